#include "balmet/gieseker.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace balmet {

boost::multiprecision::cpp_int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  boost::multiprecision::cpp_int c = 1;
  k = std::min(k, n - k);
  for (int i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;
  }
  return c;
}

std::vector<std::vector<int>> subsets_colex(int n, int r) {
  std::vector<std::vector<int>> out;
  if (r < 0 || r > n) return out;
  if (r == 0) {
    out.emplace_back();
    return out;
  }
  // Colex: recurse on the largest element.
  for (int top = r - 1; top < n; ++top) {
    for (auto& rest : subsets_colex(top, r - 1)) {
      rest.push_back(top);
      out.push_back(std::move(rest));
    }
  }
  return out;
}

bool GiesekerPoint::is_zero() const {
  for (const auto& col : column_entries) {
    if (!col.empty()) return false;
  }
  return true;
}

GiesekerPoint gieseker_point(const BundleSpec& spec, std::int64_t column_cap) {
  const int r = spec.rank();
  const int n = spec.total_sections();
  if (binomial(n, r) > column_cap) {
    std::ostringstream msg;
    msg << "wedge map needs " << binomial(n, r) << " columns, above the cap " << column_cap;
    throw resource_error(msg.str());
  }

  GiesekerPoint point;
  point.spec = spec;
  const int factors = spec.base.factor_count();
  for (const Twist& t : spec.summands) {
    point.det_twist[0] += t.deg[0];
    if (factors == 2) point.det_twist[1] += t.deg[1];
  }
  point.row_count = (point.det_twist[0] + 1) * (factors == 2 ? point.det_twist[1] + 1 : 1);

  const SectionBasis basis = h0_basis(spec);
  point.columns = subsets_colex(n, r);
  point.column_entries.resize(point.columns.size());

  std::vector<int> picked(static_cast<std::size_t>(r));
  for (std::size_t c = 0; c < point.columns.size(); ++c) {
    const std::vector<int>& subset = point.columns[c];
    // The wedge of one section per block is (up to the identity permutation
    // given by the block ordering) a diagonal determinant: the product
    // monomial with coefficient 1. Any block picked twice kills the column.
    std::fill(picked.begin(), picked.end(), -1);
    bool nonzero = true;
    for (const int idx : subset) {
      const int blk = basis.labels[static_cast<std::size_t>(idx)].summand;
      if (picked[static_cast<std::size_t>(blk)] != -1) {
        nonzero = false;
        break;
      }
      picked[static_cast<std::size_t>(blk)] = idx;
    }
    if (!nonzero) continue;
    int e0 = 0, e1 = 0;
    for (const int idx : picked) {
      e0 += basis.labels[static_cast<std::size_t>(idx)].exponent[0];
      e1 += basis.labels[static_cast<std::size_t>(idx)].exponent[1];
    }
    const int row = factors == 2 ? e0 * (point.det_twist[1] + 1) + e1 : e0;
    point.column_entries[c].emplace_back(row, Integer(1));
  }
  return point;
}

OneParameterSubgroup make_one_parameter_subgroup(std::vector<std::int64_t> exponents) {
  std::int64_t sum = 0;
  for (const std::int64_t e : exponents) sum += e;
  if (sum != 0) {
    throw std::invalid_argument("one-parameter subgroup exponents must sum to zero, got " +
                                std::to_string(sum));
  }
  return OneParameterSubgroup{std::move(exponents)};
}

WeightReport ops_weights(const GiesekerPoint& point, const OneParameterSubgroup& subgroup) {
  if (subgroup.exponents.size() != static_cast<std::size_t>(point.spec.total_sections())) {
    throw std::invalid_argument("subgroup size does not match the section count");
  }
  if (point.is_zero()) {
    throw std::invalid_argument("the wedge map is identically zero");
  }
  WeightReport report;
  report.column_weights.reserve(point.columns.size());
  bool have_min = false;
  for (std::size_t c = 0; c < point.columns.size(); ++c) {
    std::int64_t w = 0;
    for (const int idx : point.columns[c]) w += subgroup.exponents[static_cast<std::size_t>(idx)];
    report.column_weights.push_back(w);
    if (!point.column_is_zero(c) && (!have_min || w < report.min_nonzero_weight)) {
      report.min_nonzero_weight = w;
      have_min = true;
    }
  }
  return report;
}

namespace {

Destabilization pair_subgroup(const GiesekerPoint& point, int first, int second) {
  const BundleSpec& spec = point.spec;
  // Order the pair so the first block has the larger section ratio N/r.
  // r_j = 1 throughout, so this is a comparison of section counts.
  std::int64_t n1 = spec.sections_of(first);
  std::int64_t n2 = spec.sections_of(second);
  int b1 = first, b2 = second;
  if (n1 < n2) {
    std::swap(b1, b2);
    std::swap(n1, n2);
  }

  const SectionBasis basis = h0_basis(spec);
  std::vector<std::int64_t> expo(static_cast<std::size_t>(spec.total_sections()), 0);
  for (std::size_t i = 0; i < basis.labels.size(); ++i) {
    if (basis.labels[i].summand == b1) expo[i] = -n2;
    if (basis.labels[i].summand == b2) expo[i] = n1;
  }

  Destabilization out;
  out.subgroup = make_one_parameter_subgroup(std::move(expo));
  out.weight = n1 - n2;  // r2*N1 - r1*N2 with unit ranks
  out.destabilizes = out.weight > 0;
  out.blocks = {b1, b2};

  // Exact homogeneity check: every nonzero column carries the same weight.
  const WeightReport report = ops_weights(point, out.subgroup);
  for (std::size_t c = 0; c < report.column_weights.size(); ++c) {
    if (!point.column_is_zero(c) && report.column_weights[c] != out.weight) {
      throw std::logic_error("nonzero wedge column with unexpected subgroup weight");
    }
  }
  return out;
}

}  // namespace

Destabilization destabilizing_ops(const GiesekerPoint& point) {
  if (point.spec.rank() != 2) {
    throw std::invalid_argument("destabilizing subgroup construction expects two summands");
  }
  return pair_subgroup(point, 0, 1);
}

Destabilization destabilizing_ops(const BundleSpec& spec) {
  return destabilizing_ops(gieseker_point(spec));
}

std::optional<Destabilization> find_destabilizing_pair(const GiesekerPoint& point) {
  const int m = point.spec.rank();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Destabilization d = pair_subgroup(point, i, j);
      if (d.destabilizes) return d;
    }
  }
  return std::nullopt;
}

WeightSearchResult hm_weight_search(const GiesekerPoint& point,
                                    const std::vector<OneParameterSubgroup>& candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("weight search requires at least one candidate subgroup");
  }
  WeightSearchResult best;
  bool have = false;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const WeightReport report = ops_weights(point, candidates[i]);
    if (!have || report.min_nonzero_weight > best.best_weight) {
      best.best_weight = report.min_nonzero_weight;
      best.best_index = i;
      best.best = candidates[i];
      have = true;
    }
  }
  return best;
}

std::vector<std::complex<double>> evaluate_columns(const GiesekerPoint& point,
                                                   const ChartPoint& x) {
  const int factors = point.spec.base.factor_count();
  // Monomial values of det E by row index.
  std::vector<std::complex<double>> monomial(static_cast<std::size_t>(point.row_count));
  std::complex<double> zp = 1.0;
  for (int e0 = 0; e0 <= point.det_twist[0]; ++e0) {
    if (factors == 2) {
      std::complex<double> wp = 1.0;
      for (int e1 = 0; e1 <= point.det_twist[1]; ++e1) {
        monomial[static_cast<std::size_t>(e0 * (point.det_twist[1] + 1) + e1)] = zp * wp;
        wp *= x.coord[1];
      }
    } else {
      monomial[static_cast<std::size_t>(e0)] = zp;
    }
    zp *= x.coord[0];
  }

  std::vector<std::complex<double>> out(point.columns.size(), 0.0);
  for (std::size_t c = 0; c < point.columns.size(); ++c) {
    for (const auto& [row, coeff] : point.column_entries[c]) {
      out[c] += coeff.convert_to<double>() * monomial[static_cast<std::size_t>(row)];
    }
  }
  return out;
}

}  // namespace balmet
