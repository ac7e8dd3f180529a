#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "balmet/geometry.hpp"
#include "balmet/transform.hpp"

namespace balmet {

/// Twist of one line-bundle summand: degree per CP1 factor (second entry
/// unused over CP1).
struct Twist {
  std::array<int, 2> deg{0, 0};
};

/// E = O(k_1) + ... + O(k_r) as an ordered direct sum of line bundles.
struct BundleSpec {
  PolarizedBase base;
  std::vector<Twist> summands;

  int rank() const { return static_cast<int>(summands.size()); }

  /// N_j = dim H^0 of summand j.
  int sections_of(int j) const {
    const Twist& t = summands[static_cast<std::size_t>(j)];
    int n = t.deg[0] + 1;
    if (base.factor_count() == 2) n *= t.deg[1] + 1;
    return n;
  }

  int total_sections() const {
    int n = 0;
    for (int j = 0; j < rank(); ++j) n += sections_of(j);
    return n;
  }
};

/// Validates twists (nonnegative, at least one summand) against the base.
BundleSpec make_bundle(const PolarizedBase& base, std::vector<Twist> twists);

/// One monomial section: summand index and exponent per factor.
struct SectionLabel {
  int summand = 0;
  std::array<int, 2> exponent{0, 0};
};

/// The monomial basis of H^0(M,E), block-ordered by summand, exponents
/// lexicographic within a block.
struct SectionBasis {
  BundleSpec spec;
  std::vector<SectionLabel> labels;
  std::vector<int> block_offsets;

  int total() const { return static_cast<int>(labels.size()); }
};

SectionBasis h0_basis(const BundleSpec& spec);

/// Affine is the chart z = z1/z0 on each factor; Opposite flips every factor
/// to the 1/z coordinate with the induced frame (monomial exponent m becomes
/// twist - m).
enum class Chart { Affine, Opposite };

/// The r x N section-evaluation matrix at a chart point: column i is the value
/// of the i-th (transformed) basis section in the chart frame. With the
/// identity transform, row b is supported on block b and carries the raw
/// monomial values.
struct EvaluationMatrix {
  ChartPoint point;
  Eigen::MatrixXcd entries;
};

EvaluationMatrix evaluate_sections(const SectionBasis& basis, const BasisTransform& transform,
                                   const ChartPoint& x, Chart chart = Chart::Affine);

/// Reference monomial evaluation (identity transform) without the transform
/// multiply; used on hot paths.
void reference_row_values(const SectionBasis& basis, const ChartPoint& x, Chart chart,
                          std::vector<std::complex<double>>& values);

struct RatioCriterion {
  bool holds = true;
  /// r_j/N_j in lowest terms, one per summand.
  std::vector<std::pair<std::int64_t, std::int64_t>> ratios;
};

/// Exact integer comparison of the section ratios r_j/N_j; no floating point.
RatioCriterion ratio_criterion(const BundleSpec& spec);

/// Bundle grammar: sum := term ('+' term)*; term := 'O(' int (',' int)? ')'.
/// Whitespace-insensitive. One-parameter twists select CP1, two-parameter
/// twists CP1xCP1; mixing arities is an error. Form weights default to 1.
/// Throws parse_error (with byte offset) on syntax errors, std::range_error on
/// negative twists.
BundleSpec parse_bundle(std::string_view text);

/// As above, but also checks the inferred base kind.
BundleSpec parse_bundle(std::string_view text, BaseKind expected);

}  // namespace balmet
