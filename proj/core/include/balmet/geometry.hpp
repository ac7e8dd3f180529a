#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "balmet/errors.hpp"

namespace balmet {

enum class BaseKind { CP1, CP1xCP1 };

/// A point of the base in the affine chart(s), one coordinate per CP1 factor.
struct ChartPoint {
  std::array<std::complex<double>, 2> coord{};
  int factors = 1;

  std::complex<double> z() const { return coord[0]; }
  std::complex<double> w() const { return coord[1]; }
};

inline ChartPoint cp1_point(std::complex<double> z) { return {{z, 0.0}, 1}; }
inline ChartPoint cp2f_point(std::complex<double> z, std::complex<double> w) {
  return {{z, w}, 2};
}

/// The polarized base manifold: CP1 or CP1xCP1 with a weighted product
/// Fubini-Study form. `volume` is the total mass of omega^n/n!, computed in
/// closed form (a*pi resp. a*b*pi^2).
struct PolarizedBase {
  BaseKind kind = BaseKind::CP1;
  std::array<double, 2> form_weight{1.0, 1.0};
  int complex_dim = 1;
  double volume = 0.0;

  int factor_count() const { return complex_dim; }
};

PolarizedBase make_base(BaseKind kind, double weight_a, double weight_b = 1.0);

/// One CP1 factor of a tensor quadrature rule. Radial nodes are Gauss-Legendre
/// in u = r^2/(1+r^2) on [0,1]; angles are uniform. The per-node weight
/// radial_weight[i] already folds in the Fubini-Study volume density, the form
/// weight and the angular 1/m factor, so the node weights of one factor sum to
/// that factor's volume.
struct FactorRule {
  std::vector<double> radius;
  std::vector<double> radial_weight;
  std::vector<std::complex<double>> phase;

  std::size_t node_count() const { return radius.size() * phase.size(); }
};

/// Tensor-product quadrature over the base. Product rules are iterated through
/// flat indices instead of materializing the node list (order 64 on CP1xCP1
/// has 64^4 nodes). Flat order is factor-major and fixed, so every summation
/// pass visits nodes in the same order.
class QuadratureRule {
 public:
  QuadratureRule(const PolarizedBase& base, int order);

  int order() const { return order_; }
  int factor_count() const { return static_cast<int>(factors_.size()); }
  const FactorRule& factor(int f) const { return factors_[static_cast<std::size_t>(f)]; }
  double volume() const { return volume_; }

  std::size_t node_count() const {
    std::size_t n = 1;
    for (const auto& f : factors_) n *= f.node_count();
    return n;
  }

  ChartPoint node(std::size_t flat) const;
  double weight(std::size_t flat) const;

  /// Visits every node once, in flat order. f(point, weight).
  template <class F>
  void for_each(F&& f) const {
    if (factors_.size() == 1) {
      const FactorRule& a = factors_[0];
      for (std::size_t i = 0; i < a.radius.size(); ++i) {
        for (std::size_t l = 0; l < a.phase.size(); ++l) {
          f(ChartPoint{{a.radius[i] * a.phase[l], 0.0}, 1}, a.radial_weight[i]);
        }
      }
      return;
    }
    const FactorRule& a = factors_[0];
    const FactorRule& b = factors_[1];
    for (std::size_t i = 0; i < a.radius.size(); ++i) {
      for (std::size_t l = 0; l < a.phase.size(); ++l) {
        const std::complex<double> z = a.radius[i] * a.phase[l];
        const double wa = a.radial_weight[i];
        for (std::size_t j = 0; j < b.radius.size(); ++j) {
          for (std::size_t m = 0; m < b.phase.size(); ++m) {
            f(ChartPoint{{z, b.radius[j] * b.phase[m]}, 2}, wa * b.radial_weight[j]);
          }
        }
      }
    }
  }

 private:
  std::vector<FactorRule> factors_;
  int order_;
  double volume_;
};

/// Builds the tensor rule; order is the radial and the angular count per
/// factor. Radial Gauss-Legendre of order m integrates the moment densities
/// u^j (1-u)^{k-j} exactly for k <= 2m-1; m uniform angles are exact for
/// angular frequencies below m.
QuadratureRule quadrature_nodes(const PolarizedBase& base, int order);

/// (1/V(M)) * sum_i w_i f(x_i). The 1/V normalization lives here and nowhere
/// else. Accumulation is chunked two-level in flat node order, so results are
/// bit-for-bit reproducible at fixed order.
template <class F>
std::complex<double> integrate(const PolarizedBase& base, const QuadratureRule& rule, F&& f) {
  constexpr std::size_t kChunk = 4096;
  std::complex<double> total = 0.0;
  std::complex<double> chunk = 0.0;
  std::size_t in_chunk = 0;
  std::size_t index = 0;
  rule.for_each([&](const ChartPoint& x, double w) {
    const std::complex<double> v = f(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "integrand is not finite at node " << index << " (z = " << x.coord[0];
      if (x.factors > 1) msg << ", w = " << x.coord[1];
      msg << ")";
      throw numerical_domain_error(msg.str());
    }
    chunk += w * v;
    ++index;
    if (++in_chunk == kChunk) {
      total += chunk;
      chunk = 0.0;
      in_chunk = 0;
    }
  });
  total += chunk;
  return total / base.volume;
}

/// Exact value of (1/pi) Int_C |z|^{2j} (1+|z|^2)^{-k} (1+|z|^2)^{-2} dA,
/// namely j!(k-j)!/(k+1)!. Independent closed-form oracle for the quadrature;
/// product-base moments are products of factor moments.
boost::multiprecision::cpp_rational monomial_moment_oracle(int j, int k);

/// Gauss-Legendre nodes and weights on [0,1]; weights sum to 1.
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace balmet
