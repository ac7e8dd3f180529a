#include "balmet/embedding.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "balmet/rng.hpp"

namespace balmet {

namespace {

std::string describe_point(const ChartPoint& x) {
  std::ostringstream msg;
  msg << "z = " << x.coord[0];
  if (x.factors > 1) msg << ", w = " << x.coord[1];
  return msg.str();
}

double log_det_ss(const SectionBasis& basis, const BasisTransform& transform,
                  const ChartPoint& x) {
  const EvaluationMatrix s = evaluate_sections(basis, transform, x);
  const Eigen::MatrixXcd m = s.entries * s.entries.adjoint();
  const Eigen::LLT<Eigen::MatrixXcd> llt(m);
  if (!m.allFinite() || llt.info() != Eigen::Success) {
    throw degenerate_point_error("section evaluation is rank-deficient at " + describe_point(x));
  }
  double log_det = 0.0;
  const auto l = llt.matrixL();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    log_det += std::log(std::real(l(i, i)));
  }
  return 2.0 * log_det;
}

}  // namespace

GrassmannPoint kodaira_point(const SectionBasis& basis, const BasisTransform& transform,
                             const ChartPoint& x) {
  const EvaluationMatrix s = evaluate_sections(basis, transform, x);
  const Eigen::MatrixXcd m = s.entries * s.entries.adjoint();
  if (!m.allFinite() || Eigen::LLT<Eigen::MatrixXcd>(m).info() != Eigen::Success) {
    throw degenerate_point_error("Kodaira map undefined: evaluation is rank-deficient at " +
                                 describe_point(x));
  }
  return GrassmannPoint{s.entries};
}

PluckerVector plucker(const GrassmannPoint& point) {
  const int r = static_cast<int>(point.representative.rows());
  const int n = static_cast<int>(point.representative.cols());
  const auto subsets = subsets_colex(n, r);
  PluckerVector out;
  out.coordinates.resize(static_cast<Eigen::Index>(subsets.size()));
  Eigen::MatrixXcd minor(r, r);
  for (std::size_t c = 0; c < subsets.size(); ++c) {
    for (int j = 0; j < r; ++j) {
      minor.col(j) = point.representative.col(subsets[c][static_cast<std::size_t>(j)]);
    }
    out.coordinates(static_cast<Eigen::Index>(c)) = minor.determinant();
  }
  return out;
}

PotentialRoutes potential_routes(const SectionBasis& basis, const BasisTransform& transform,
                                 const ChartPoint& x) {
  PotentialRoutes routes;
  const GrassmannPoint p = kodaira_point(basis, transform, x);
  const PluckerVector v = plucker(p);
  routes.via_minors = std::log(v.coordinates.squaredNorm());
  routes.via_det = log_det_ss(basis, transform, x);
  return routes;
}

double pullback_potential(const SectionBasis& basis, const BasisTransform& transform,
                          const ChartPoint& x) {
  const PotentialRoutes routes = potential_routes(basis, transform, x);
  const double scale = std::max(1.0, std::abs(routes.via_det));
  if (!(std::abs(routes.via_minors - routes.via_det) <= 1e-6 * scale)) {
    std::ostringstream msg;
    msg << "potential routes disagree at " << describe_point(x) << ": minors "
        << routes.via_minors << " vs det " << routes.via_det;
    throw numerical_domain_error(msg.str());
  }
  return routes.via_det;
}

namespace {

ChartPoint shifted(const ChartPoint& x, int factor, double d_re, double d_im) {
  ChartPoint y = x;
  y.coord[static_cast<std::size_t>(factor)] += std::complex<double>(d_re, d_im);
  return y;
}

Eigen::MatrixXcd form_at_step(const SectionBasis& basis, const BasisTransform& transform,
                              const ChartPoint& x, double h) {
  const int n = basis.spec.base.factor_count();
  auto phi = [&](const ChartPoint& p) { return log_det_ss(basis, transform, p); };
  const double center = phi(x);

  Eigen::MatrixXcd form(n, n);
  for (int i = 0; i < n; ++i) {
    const double pxx = (phi(shifted(x, i, h, 0)) - 2.0 * center + phi(shifted(x, i, -h, 0))) / (h * h);
    const double pyy = (phi(shifted(x, i, 0, h)) - 2.0 * center + phi(shifted(x, i, 0, -h))) / (h * h);
    form(i, i) = 0.25 * (pxx + pyy);
  }
  // Cross stencil for d^2/da db along real directions (a in factor i, b in j).
  auto cross = [&](int i, bool i_imag, int j, bool j_imag) {
    auto move = [&](double si, double sj) {
      ChartPoint p = shifted(x, i, i_imag ? 0 : si * h, i_imag ? si * h : 0);
      p = shifted(p, j, j_imag ? 0 : sj * h, j_imag ? sj * h : 0);
      return phi(p);
    };
    return (move(1, 1) - move(1, -1) - move(-1, 1) + move(-1, -1)) / (4.0 * h * h);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dxx = cross(i, false, j, false);
      const double dyy = cross(i, true, j, true);
      const double dxy = cross(i, false, j, true);
      const double dyx = cross(i, true, j, false);
      form(i, j) = 0.25 * std::complex<double>(dxx + dyy, dxy - dyx);
      form(j, i) = std::conj(form(i, j));
    }
  }
  if (!form.allFinite()) {
    throw numerical_domain_error("finite differences of the potential are not finite at " +
                                 describe_point(x));
  }
  return form;
}

}  // namespace

PullbackForm pullback_form(const SectionBasis& basis, const BasisTransform& transform,
                           const ChartPoint& x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  PullbackForm out;
  out.coefficients = form_at_step(basis, transform, x, step);
  const Eigen::MatrixXcd doubled = form_at_step(basis, transform, x, 2.0 * step);
  out.richardson_delta = (out.coefficients - doubled).cwiseAbs().maxCoeff();
  return out;
}

namespace {

/// Coefficients of (c + d t)^m (e + f t)^{k-m} as a degree-k polynomial in t.
std::vector<std::complex<double>> binomial_product(int m, int k, std::complex<double> c,
                                                   std::complex<double> d, std::complex<double> e,
                                                   std::complex<double> f) {
  std::vector<std::complex<double>> first(static_cast<std::size_t>(m) + 1);
  std::vector<std::complex<double>> second(static_cast<std::size_t>(k - m) + 1);
  auto fill = [](std::vector<std::complex<double>>& coef, std::complex<double> lo,
                 std::complex<double> hi) {
    const int deg = static_cast<int>(coef.size()) - 1;
    // C(deg, i) lo^{deg-i} hi^i, built by the Pascal recurrence.
    std::complex<double> binom = 1.0;
    std::vector<std::complex<double>> lo_pow(coef.size()), hi_pow(coef.size());
    lo_pow[0] = hi_pow[0] = 1.0;
    for (int i = 1; i <= deg; ++i) {
      lo_pow[static_cast<std::size_t>(i)] = lo_pow[static_cast<std::size_t>(i - 1)] * lo;
      hi_pow[static_cast<std::size_t>(i)] = hi_pow[static_cast<std::size_t>(i - 1)] * hi;
    }
    for (int i = 0; i <= deg; ++i) {
      coef[static_cast<std::size_t>(i)] =
          binom * lo_pow[static_cast<std::size_t>(deg - i)] * hi_pow[static_cast<std::size_t>(i)];
      binom *= static_cast<double>(deg - i);
      binom /= static_cast<double>(i + 1);
    }
  };
  fill(first, c, d);
  fill(second, e, f);
  std::vector<std::complex<double>> conv(static_cast<std::size_t>(k) + 1, 0.0);
  for (std::size_t i = 0; i < first.size(); ++i) {
    for (std::size_t l = 0; l < second.size(); ++l) {
      conv[i + l] += first[i] * second[l];
    }
  }
  return conv;
}

/// Monomial-basis matrix of precomposition with u on sections of O(k) over one
/// factor: row m holds the coefficients of (monomial m) o u.
Eigen::MatrixXcd factor_action(int k, const Eigen::Matrix2cd& u) {
  Eigen::MatrixXcd action(k + 1, k + 1);
  for (int m = 0; m <= k; ++m) {
    // Monomial z1^m z0^{k-m} precomposed with (z0, z1) -> (a z0 + b z1, c z0 + d z1).
    const auto coef = binomial_product(m, k, u(1, 0), u(1, 1), u(0, 0), u(0, 1));
    for (int p = 0; p <= k; ++p) action(m, p) = coef[static_cast<std::size_t>(p)];
  }
  return action;
}

void require_unitary(const Eigen::Matrix2cd& u) {
  if ((u.adjoint() * u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("isometry factors must be 2x2 unitary matrices");
  }
}

}  // namespace

Eigen::MatrixXcd section_action(const SectionBasis& basis, const IsometryElement& g) {
  const int factors = basis.spec.base.factor_count();
  if (static_cast<int>(g.factor.size()) != factors) {
    throw std::invalid_argument("isometry must supply one unitary per CP1 factor");
  }
  for (const auto& u : g.factor) require_unitary(u);

  const int n = basis.total();
  Eigen::MatrixXcd action = Eigen::MatrixXcd::Zero(n, n);
  int offset = 0;
  for (int j = 0; j < basis.spec.rank(); ++j) {
    const Twist& t = basis.spec.summands[static_cast<std::size_t>(j)];
    const Eigen::MatrixXcd a0 = factor_action(t.deg[0], g.factor[0]);
    if (factors == 1) {
      action.block(offset, offset, t.deg[0] + 1, t.deg[0] + 1) = a0;
      offset += t.deg[0] + 1;
    } else {
      const Eigen::MatrixXcd a1 = factor_action(t.deg[1], g.factor[1]);
      const int n0 = t.deg[0] + 1, n1 = t.deg[1] + 1;
      // Kronecker structure matching the (m0, m1) row-major label order.
      for (int m0 = 0; m0 < n0; ++m0) {
        for (int p0 = 0; p0 < n0; ++p0) {
          action.block(offset + m0 * n1, offset + p0 * n1, n1, n1) = a0(m0, p0) * a1;
        }
      }
      offset += n0 * n1;
    }
  }
  return action;
}

double isometry_invariance_check(const BundleSpec& spec, const BasisTransform& balanced,
                                 const std::vector<IsometryElement>& elements,
                                 const std::vector<ChartPoint>& samples) {
  if (samples.empty()) throw std::invalid_argument("invariance check needs sample points");
  const SectionBasis basis = h0_basis(spec);
  const std::vector<Eigen::MatrixXcd> reference = metric_samples(basis, balanced, samples);
  const double ref_trace = reference[0].trace().real();

  double worst = 0.0;
  for (const IsometryElement& g : elements) {
    const Eigen::MatrixXcd act = section_action(basis, g);
    const BasisTransform moved = BasisTransform::from_matrix(balanced.matrix() * act);
    const std::vector<Eigen::MatrixXcd> pulled = metric_samples(basis, moved, samples);
    const double pulled_trace = pulled[0].trace().real();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double d = (pulled[i] / pulled_trace - reference[i] / ref_trace).norm();
      worst = std::max(worst, d);
    }
  }
  return worst;
}

std::vector<IsometryElement> random_isometries(const PolarizedBase& base, int count,
                                               std::uint64_t seed) {
  Rng rng(seed);
  std::vector<IsometryElement> out;
  for (int e = 0; e < count; ++e) {
    IsometryElement g;
    for (int f = 0; f < base.factor_count(); ++f) {
      Eigen::Matrix2cd ginibre;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) ginibre(i, j) = rng.complex_normal();
      }
      const Eigen::HouseholderQR<Eigen::Matrix2cd> qr(ginibre);
      Eigen::Matrix2cd q = qr.householderQ();
      const Eigen::Matrix2cd r = qr.matrixQR().triangularView<Eigen::Upper>();
      for (int j = 0; j < 2; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
      q /= std::sqrt(q.determinant());  // land in SU(2)
      g.factor.push_back(q);
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<ChartPoint> sample_points(const PolarizedBase& base, int count, std::uint64_t seed,
                                      double radius) {
  Rng rng(seed);
  std::vector<ChartPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    ChartPoint x;
    x.factors = base.factor_count();
    for (int f = 0; f < base.factor_count(); ++f) {
      const double r = radius * std::sqrt(rng.uniform());
      const double theta = 2.0 * std::numbers::pi * rng.uniform();
      x.coord[static_cast<std::size_t>(f)] = std::polar(r, theta);
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace balmet
