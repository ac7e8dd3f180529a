#include "balmet/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace balmet {

namespace {
constexpr double kPi = std::numbers::pi;
}

PolarizedBase make_base(BaseKind kind, double weight_a, double weight_b) {
  if (!(weight_a > 0.0) || (kind == BaseKind::CP1xCP1 && !(weight_b > 0.0))) {
    throw std::invalid_argument("form weights must be strictly positive");
  }
  PolarizedBase base;
  base.kind = kind;
  if (kind == BaseKind::CP1) {
    base.form_weight = {weight_a, 1.0};
    base.complex_dim = 1;
    base.volume = weight_a * kPi;
  } else {
    base.form_weight = {weight_a, weight_b};
    base.complex_dim = 2;
    base.volume = weight_a * weight_b * kPi * kPi;
  }
  return base;
}

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // Map from [-1,1] to [0,1]; total weight 1.
    const double w = 1.0 / ((1.0 - x * x) * pp * pp);
    nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
    nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + x);
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

QuadratureRule::QuadratureRule(const PolarizedBase& base, int order)
    : order_(order), volume_(base.volume) {
  if (order < 4) throw std::invalid_argument("quadrature order must be >= 4");
  std::vector<double> u, wu;
  gauss_legendre_01(order, u, wu);
  const std::size_t m = static_cast<std::size_t>(order);
  for (int f = 0; f < base.factor_count(); ++f) {
    FactorRule fr;
    fr.radius.resize(m);
    fr.radial_weight.resize(m);
    fr.phase.resize(m);
    const double scale = base.form_weight[static_cast<std::size_t>(f)] * kPi / order;
    for (std::size_t i = 0; i < m; ++i) {
      // u = r^2/(1+r^2); the Fubini-Study density makes the measure uniform in u.
      fr.radius[i] = std::sqrt(u[i] / (1.0 - u[i]));
      fr.radial_weight[i] = scale * wu[i];
    }
    for (std::size_t l = 0; l < m; ++l) {
      const double theta = 2.0 * kPi * static_cast<double>(l) / order;
      fr.phase[l] = {std::cos(theta), std::sin(theta)};
    }
    factors_.push_back(std::move(fr));
  }
}

ChartPoint QuadratureRule::node(std::size_t flat) const {
  ChartPoint x;
  x.factors = factor_count();
  // Flat order is factor-major: ((i1*m + l1)*n2) + (i2*m + l2).
  std::size_t rest = flat;
  for (int f = factor_count() - 1; f >= 0; --f) {
    const FactorRule& fr = factors_[static_cast<std::size_t>(f)];
    const std::size_t n = fr.node_count();
    const std::size_t local = rest % n;
    rest /= n;
    const std::size_t i = local / fr.phase.size();
    const std::size_t l = local % fr.phase.size();
    x.coord[static_cast<std::size_t>(f)] = fr.radius[i] * fr.phase[l];
  }
  return x;
}

double QuadratureRule::weight(std::size_t flat) const {
  double w = 1.0;
  std::size_t rest = flat;
  for (int f = factor_count() - 1; f >= 0; --f) {
    const FactorRule& fr = factors_[static_cast<std::size_t>(f)];
    const std::size_t n = fr.node_count();
    const std::size_t local = rest % n;
    rest /= n;
    w *= fr.radial_weight[local / fr.phase.size()];
  }
  return w;
}

QuadratureRule quadrature_nodes(const PolarizedBase& base, int order) {
  return QuadratureRule(base, order);
}

boost::multiprecision::cpp_rational monomial_moment_oracle(int j, int k) {
  if (j < 0 || j > k) {
    throw std::invalid_argument("monomial moment requires 0 <= j <= k");
  }
  using boost::multiprecision::cpp_int;
  auto factorial = [](int n) {
    cpp_int f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  return boost::multiprecision::cpp_rational(factorial(j) * factorial(k - j),
                                             factorial(k + 1));
}

}  // namespace balmet
