#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "balmet/bundle.hpp"
#include "balmet/errors.hpp"
#include "balmet/geometry.hpp"
#include "balmet/transform.hpp"

namespace balmet {

/// P(x) = S^* (S S^*)^{-1} S for a full-rank r x N evaluation matrix: the
/// orthogonal projection whose entry (k, j) is the pointwise inner product of
/// basis sections j and k under the pulled-back Grassmannian quotient metric.
/// Hermitian, idempotent, trace r. Throws degenerate_point_error when S loses
/// rank.
Eigen::MatrixXcd pointwise_projection(const EvaluationMatrix& s);

/// The normalized L2 Gram matrix: entries(j, k) = (1/V) Int P(x)_{kj}.
struct GramMatrix {
  Eigen::MatrixXcd entries;
  int rank = 0;
  int sections = 0;
};

GramMatrix gram_matrix(const SectionBasis& basis, const BasisTransform& transform,
                       const QuadratureRule& rule);

/// Frobenius distance of G from (r/N) * Identity; zero exactly at a balanced
/// basis (up to quadrature).
double balance_defect(const Eigen::MatrixXcd& gram, int rank, int sections);
double balance_defect(const GramMatrix& gram);

enum class Diagnosis { Balanced, MaxIterations, Degeneration };
std::string to_string(Diagnosis d);

enum class InitialTransform { Identity, RandomUnitary };

struct BalanceOptions {
  double tol = 1e-10;
  int max_iter = 500;
  int quad_order = 64;
  std::uint64_t seed = 0;
  InitialTransform init = InitialTransform::Identity;
  /// Degeneration floor on the smallest Gram eigenvalue, scaled by N.
  double degeneration_floor = 1e-12;
};

struct BalanceResult {
  bool converged = false;
  Diagnosis diagnosis = Diagnosis::MaxIterations;
  int iterations = 0;
  std::vector<double> defect_history;
  std::vector<double> min_eigenvalue_history;
  std::vector<double> trace_history;
  Eigen::MatrixXcd gram_final;
  BasisTransform final_transform;
};

/// One balancing step: A <- G^{-1/2} A, rescaled to |det| = 1. The Gram matrix
/// is invariant under global scaling of A, so the rescale leaves defects
/// untouched; fixed points up to scale are exactly the balanced bases.
/// Throws degeneration_error when the smallest Gram eigenvalue is below
/// floor_scale * N.
BasisTransform iteration_step(const SectionBasis& basis, const BasisTransform& transform,
                              const QuadratureRule& rule, double floor_scale = 1e-12);

BasisTransform initial_transform(int sections, const BalanceOptions& options);

/// Fixed-point iteration from the configured initial transform. Converged
/// means the defect dropped below tol; otherwise the diagnosis reports
/// MaxIterations or Degeneration. Defect histories are recorded, not asserted
/// monotone.
BalanceResult find_balanced(const BundleSpec& spec, const BalanceOptions& options = {});
BalanceResult find_balanced(const BundleSpec& spec, const BalanceOptions& options,
                            const BasisTransform& initial);

/// Block-diagonal concatenation of balanced factor bases. Requires every
/// factor converged and the section ratios r_j/N_j equal; the result is
/// balanced for the direct sum without further iteration.
BasisTransform concat_balanced(const BundleSpec& spec, const std::vector<BalanceResult>& factors);

/// H(x) = (S S^*)^{-1}, the r x r metric of the chart frame at each point.
/// The metric, not the basis, is the invariant object; gauge-free comparisons
/// use ratios of H between points.
std::vector<Eigen::MatrixXcd> metric_samples(const SectionBasis& basis,
                                             const BasisTransform& transform,
                                             const std::vector<ChartPoint>& points);

}  // namespace balmet
