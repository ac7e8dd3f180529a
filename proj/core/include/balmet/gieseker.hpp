#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "balmet/bundle.hpp"
#include "balmet/subsets.hpp"

namespace balmet {

using Integer = boost::multiprecision::cpp_int;

/// The wedge map /\^r H^0(E) -> H^0(det E) in exact integer arithmetic.
/// Columns are indexed by r-subsets of the monomial basis in colex order; rows
/// by the monomial basis of det E (lexicographic in the exponents). A column
/// is nonzero exactly when its subset picks one section per summand block, in
/// which case it is the product monomial with coefficient 1.
struct GiesekerPoint {
  BundleSpec spec;
  std::array<int, 2> det_twist{0, 0};
  int row_count = 0;
  std::vector<std::vector<int>> columns;
  /// Sparse entries per column: (row, coefficient).
  std::vector<std::vector<std::pair<int, Integer>>> column_entries;

  bool column_is_zero(std::size_t c) const { return column_entries[c].empty(); }
  bool is_zero() const;
};

/// Builds the wedge map. Throws resource_error when binomial(N, r) exceeds
/// column_cap.
GiesekerPoint gieseker_point(const BundleSpec& spec, std::int64_t column_cap = 1'000'000);

/// Diagonal one-parameter subgroup of SL(N): integer exponents summing to 0.
struct OneParameterSubgroup {
  std::vector<std::int64_t> exponents;
};

/// Validates the zero-sum constraint.
OneParameterSubgroup make_one_parameter_subgroup(std::vector<std::int64_t> exponents);

struct WeightReport {
  /// Weight of every column, sum of the subgroup exponents over the subset.
  std::vector<std::int64_t> column_weights;
  /// Minimum over columns with a nonzero coefficient vector; g(t) T -> 0 as
  /// t -> 0 iff this is positive.
  std::int64_t min_nonzero_weight = 0;
};

WeightReport ops_weights(const GiesekerPoint& point, const OneParameterSubgroup& subgroup);

struct Destabilization {
  OneParameterSubgroup subgroup;  // exponents in the original basis order
  std::int64_t weight = 0;        // the common weight of every nonzero column
  bool destabilizes = false;
  std::array<int, 2> blocks{0, 1};  // the summand pair, larger N/r first
};

/// The witness subgroup for a two-summand bundle: -N2 on the block with the
/// larger section ratio (repeated N1 times), +N1 on the other (N2 times).
/// Every nonzero wedge column carries weight r2*N1 - r1*N2 exactly, which is
/// asserted against the point; positive weight sends the whole point to zero.
Destabilization destabilizing_ops(const GiesekerPoint& point);
Destabilization destabilizing_ops(const BundleSpec& spec);

/// Pairwise reduction for bundles with more than two summands: returns the
/// first destabilizing pair (subgroup supported on that pair), if any.
std::optional<Destabilization> find_destabilizing_pair(const GiesekerPoint& point);

struct WeightSearchResult {
  std::int64_t best_weight = 0;
  std::size_t best_index = 0;
  OneParameterSubgroup best;
};

/// Max of min_nonzero_weight over the candidates. A positive result certifies
/// non-stability; a non-positive one over a finite list certifies nothing.
WeightSearchResult hm_weight_search(const GiesekerPoint& point,
                                    const std::vector<OneParameterSubgroup>& candidates);

/// Evaluates every column's det E section at a chart point. Equals the vector
/// of r x r minors of the reference section matrix (colex column order).
std::vector<std::complex<double>> evaluate_columns(const GiesekerPoint& point,
                                                   const ChartPoint& x);

}  // namespace balmet
