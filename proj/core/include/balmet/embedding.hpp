#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "balmet/bundle.hpp"
#include "balmet/metric.hpp"
#include "balmet/subsets.hpp"
#include "balmet/transform.hpp"

namespace balmet {

/// A point of G(r, N) represented by a full-rank r x N matrix (its row space).
struct GrassmannPoint {
  Eigen::MatrixXcd representative;
};

/// The image of a chart point under the Kodaira map of the (transformed)
/// section basis. Throws degenerate_point_error when evaluation loses rank.
GrassmannPoint kodaira_point(const SectionBasis& basis, const BasisTransform& transform,
                             const ChartPoint& x);

/// Pluecker coordinates: all r x r minors of the representative, colex column
/// subsets (the same order as the wedge-map columns). Defined up to scale.
struct PluckerVector {
  Eigen::VectorXcd coordinates;
};

PluckerVector plucker(const GrassmannPoint& point);

/// Both evaluations of the pulled-back Fubini-Study potential at a point:
/// log sum_J |minor_J|^2 via the Pluecker embedding, and log det(S S^*).
/// The two agree identically by the Cauchy-Binet formula.
struct PotentialRoutes {
  double via_minors = 0.0;
  double via_det = 0.0;
};

PotentialRoutes potential_routes(const SectionBasis& basis, const BasisTransform& transform,
                                 const ChartPoint& x);

/// The potential, cross-checked between the two routes (throws
/// numerical_domain_error if they disagree beyond 1e-6).
double pullback_potential(const SectionBasis& basis, const BasisTransform& transform,
                          const ChartPoint& x);

/// Coefficients of the pulled-back Kaehler form at x: the mixed complex
/// Hessian d^2 phi / dz_i dzbar_j of the potential, by centered finite
/// differences of step h. richardson_delta is the largest entry change when
/// the step doubles; a value far above the target accuracy flags a bad step.
struct PullbackForm {
  Eigen::MatrixXcd coefficients;
  double richardson_delta = 0.0;
};

PullbackForm pullback_form(const SectionBasis& basis, const BasisTransform& transform,
                           const ChartPoint& x, double step = 1e-4);

/// An isometry of the base: one 2x2 unitary per CP1 factor, acting on
/// homogeneous coordinates (and on sections of each summand by precomposition).
struct IsometryElement {
  std::vector<Eigen::Matrix2cd> factor;
};

/// The N x N matrix of the precomposition action on the monomial section
/// basis: row j holds the monomial coefficients of (section j) o g.
Eigen::MatrixXcd section_action(const SectionBasis& basis, const IsometryElement& g);

/// Pulls the metric back under each group element and compares gauge-fixed
/// metric samples against the original; returns the largest Frobenius
/// discrepancy over elements and sample points. Non-unitary elements are
/// rejected.
double isometry_invariance_check(const BundleSpec& spec, const BasisTransform& balanced,
                                 const std::vector<IsometryElement>& elements,
                                 const std::vector<ChartPoint>& samples);

/// Haar-random special unitary isometries (one per requested element).
std::vector<IsometryElement> random_isometries(const PolarizedBase& base, int count,
                                               std::uint64_t seed);

/// Deterministic sample points in the chart, uniform on the disk of the given
/// radius per factor.
std::vector<ChartPoint> sample_points(const PolarizedBase& base, int count, std::uint64_t seed,
                                      double radius = 1.5);

}  // namespace balmet
