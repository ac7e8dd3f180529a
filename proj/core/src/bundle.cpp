#include "balmet/bundle.hpp"

#include <cctype>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace balmet {

BundleSpec make_bundle(const PolarizedBase& base, std::vector<Twist> twists) {
  if (twists.empty()) {
    throw std::invalid_argument("a bundle needs at least one summand");
  }
  for (const Twist& t : twists) {
    if (t.deg[0] < 0 || (base.factor_count() == 2 && t.deg[1] < 0)) {
      throw std::range_error("summand twists must be nonnegative");
    }
  }
  return BundleSpec{base, std::move(twists)};
}

SectionBasis h0_basis(const BundleSpec& spec) {
  SectionBasis basis;
  basis.spec = spec;
  const int factors = spec.base.factor_count();
  for (int j = 0; j < spec.rank(); ++j) {
    basis.block_offsets.push_back(static_cast<int>(basis.labels.size()));
    const Twist& t = spec.summands[static_cast<std::size_t>(j)];
    if (factors == 1) {
      for (int m = 0; m <= t.deg[0]; ++m) basis.labels.push_back({j, {m, 0}});
    } else {
      for (int m = 0; m <= t.deg[0]; ++m) {
        for (int n = 0; n <= t.deg[1]; ++n) basis.labels.push_back({j, {m, n}});
      }
    }
  }
  return basis;
}

void reference_row_values(const SectionBasis& basis, const ChartPoint& x, Chart chart,
                          std::vector<std::complex<double>>& values) {
  const int factors = basis.spec.base.factor_count();
  int max_deg[2] = {0, 0};
  for (const Twist& t : basis.spec.summands) {
    for (int f = 0; f < factors; ++f) max_deg[f] = std::max(max_deg[f], t.deg[f]);
  }
  // Power tables per factor.
  thread_local std::vector<std::complex<double>> pow0, pow1;
  pow0.assign(static_cast<std::size_t>(max_deg[0]) + 1, 1.0);
  for (int p = 1; p <= max_deg[0]; ++p) pow0[static_cast<std::size_t>(p)] = pow0[static_cast<std::size_t>(p - 1)] * x.coord[0];
  if (factors == 2) {
    pow1.assign(static_cast<std::size_t>(max_deg[1]) + 1, 1.0);
    for (int p = 1; p <= max_deg[1]; ++p) pow1[static_cast<std::size_t>(p)] = pow1[static_cast<std::size_t>(p - 1)] * x.coord[1];
  }
  values.resize(basis.labels.size());
  for (std::size_t c = 0; c < basis.labels.size(); ++c) {
    const SectionLabel& lab = basis.labels[c];
    const Twist& t = basis.spec.summands[static_cast<std::size_t>(lab.summand)];
    int e0 = lab.exponent[0];
    int e1 = lab.exponent[1];
    if (chart == Chart::Opposite) {
      e0 = t.deg[0] - e0;
      e1 = t.deg[1] - e1;
    }
    std::complex<double> v = pow0[static_cast<std::size_t>(e0)];
    if (factors == 2) v *= pow1[static_cast<std::size_t>(e1)];
    values[c] = v;
  }
}

EvaluationMatrix evaluate_sections(const SectionBasis& basis, const BasisTransform& transform,
                                   const ChartPoint& x, Chart chart) {
  const int r = basis.spec.rank();
  const int n = basis.total();
  if (transform.size() != n) {
    throw std::invalid_argument("transform size does not match the section count");
  }
  std::vector<std::complex<double>> values;
  reference_row_values(basis, x, chart, values);

  EvaluationMatrix out;
  out.point = x;
  out.entries = Eigen::MatrixXcd::Zero(r, n);
  const Eigen::MatrixXcd& a = transform.matrix();
  // S = S0 * A^T with S0 row-block structured: S(b, i) = sum over columns c in
  // block b of value_c * A(i, c).
  for (int c = 0; c < n; ++c) {
    const int b = basis.labels[static_cast<std::size_t>(c)].summand;
    const std::complex<double> v = values[static_cast<std::size_t>(c)];
    if (v == std::complex<double>(0.0)) continue;
    for (int i = 0; i < n; ++i) {
      out.entries(b, i) += v * a(i, c);
    }
  }
  return out;
}

RatioCriterion ratio_criterion(const BundleSpec& spec) {
  RatioCriterion out;
  for (int j = 0; j < spec.rank(); ++j) {
    std::int64_t num = 1;  // r_j = 1 for line-bundle summands
    std::int64_t den = spec.sections_of(j);
    const std::int64_t g = std::gcd(num, den);
    out.ratios.emplace_back(num / g, den / g);
  }
  for (std::size_t j = 1; j < out.ratios.size(); ++j) {
    // Cross-multiplied integer comparison; ratios are already reduced.
    if (out.ratios[j] != out.ratios[0]) {
      out.holds = false;
      break;
    }
  }
  return out;
}

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& expected) {
    std::ostringstream msg;
    msg << "bundle spec: expected " << expected << " at byte " << pos;
    if (pos < text.size()) {
      msg << ", got \"" << text.substr(pos, std::min<std::size_t>(8, text.size() - pos)) << "\"";
    } else {
      msg << ", got end of input";
    }
    throw parse_error(msg.str(), pos);
  }

  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c) fail(std::string("'") + c + "'");
    ++pos;
  }

  int integer() {
    skip_ws();
    const std::size_t start = pos;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
      negative = text[pos] == '-';
      ++pos;
    }
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
      pos = start;
      fail("an integer");
    }
    long value = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      value = value * 10 + (text[pos] - '0');
      if (value > 1'000'000) {
        pos = start;
        throw std::range_error("twist out of range at byte " + std::to_string(start));
      }
      ++pos;
    }
    if (negative) {
      pos = start;
      throw std::range_error("twists must be nonnegative (byte " + std::to_string(start) + ")");
    }
    return static_cast<int>(value);
  }

  Twist term(int& arity) {
    skip_ws();
    if (pos >= text.size() || text[pos] != 'O') fail("'O('");
    ++pos;
    expect('(');
    Twist t;
    t.deg[0] = integer();
    int this_arity = 1;
    skip_ws();
    if (pos < text.size() && text[pos] == ',') {
      ++pos;
      t.deg[1] = integer();
      this_arity = 2;
    }
    expect(')');
    if (arity == 0) {
      arity = this_arity;
    } else if (arity != this_arity) {
      throw parse_error("bundle spec: mixed one- and two-parameter twists at byte " +
                            std::to_string(pos),
                        pos);
    }
    return t;
  }
};

}  // namespace

BundleSpec parse_bundle(std::string_view text) {
  Parser p{text};
  int arity = 0;
  std::vector<Twist> twists;
  twists.push_back(p.term(arity));
  p.skip_ws();
  while (p.pos < text.size()) {
    if (text[p.pos] != '+') p.fail("'+' or end of input");
    ++p.pos;
    twists.push_back(p.term(arity));
    p.skip_ws();
  }
  const BaseKind kind = arity == 2 ? BaseKind::CP1xCP1 : BaseKind::CP1;
  return make_bundle(make_base(kind, 1.0, 1.0), std::move(twists));
}

BundleSpec parse_bundle(std::string_view text, BaseKind expected) {
  BundleSpec spec = parse_bundle(text);
  if (spec.base.kind != expected) {
    throw std::invalid_argument(
        "bundle spec arity does not match the requested base (one-parameter twists are CP1, "
        "two-parameter twists are CP1xCP1)");
  }
  return spec;
}

}  // namespace balmet
