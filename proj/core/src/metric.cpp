#include "balmet/metric.hpp"

#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace balmet {

namespace {

std::string describe_point(const ChartPoint& x) {
  std::ostringstream msg;
  msg << "z = " << x.coord[0];
  if (x.factors > 1) msg << ", w = " << x.coord[1];
  return msg.str();
}

}  // namespace

Eigen::MatrixXcd pointwise_projection(const EvaluationMatrix& s) {
  const Eigen::MatrixXcd& S = s.entries;
  Eigen::MatrixXcd m = S * S.adjoint();
  const Eigen::LLT<Eigen::MatrixXcd> llt(m);
  if (!m.allFinite() || llt.info() != Eigen::Success) {
    throw degenerate_point_error("section evaluation is rank-deficient at " +
                                 describe_point(s.point));
  }
  Eigen::MatrixXcd b = S;
  llt.solveInPlace(b);
  return S.adjoint() * b;
}

namespace {

using Complex = std::complex<double>;

/// Projection accumulator over one radial slice of the leading factor.
/// Hand-rolled: the per-node work (section values, S = S0 A^T, Cholesky of
/// S S^*, the projection) runs over raw buffers. Accumulates sum of w * P.
class ProjectionAccumulator {
 public:
  ProjectionAccumulator(const SectionBasis& basis, const Eigen::MatrixXcd& a)
      : r_(basis.spec.rank()),
        n_(basis.total()),
        a_(a.data()),
        sum_(Eigen::MatrixXcd::Zero(basis.total(), basis.total())) {
    blocks_.reserve(static_cast<std::size_t>(n_));
    e0_.reserve(static_cast<std::size_t>(n_));
    e1_.reserve(static_cast<std::size_t>(n_));
    for (const SectionLabel& lab : basis.labels) {
      blocks_.push_back(lab.summand);
      e0_.push_back(lab.exponent[0]);
      e1_.push_back(lab.exponent[1]);
      max_deg_[0] = std::max(max_deg_[0], lab.exponent[0]);
      max_deg_[1] = std::max(max_deg_[1], lab.exponent[1]);
    }
    zpow_.resize(static_cast<std::size_t>(max_deg_[0]) + 1);
    wpow_.resize(static_cast<std::size_t>(max_deg_[1]) + 1);
    s_.resize(static_cast<std::size_t>(r_ * n_));
    b_.resize(static_cast<std::size_t>(r_ * n_));
    chol_.resize(static_cast<std::size_t>(r_ * r_));
  }

  void add(const ChartPoint& x, double weight) {
    const int r = r_, n = n_;
    zpow_[0] = 1.0;
    for (int p = 1; p <= max_deg_[0]; ++p) zpow_[static_cast<std::size_t>(p)] = zpow_[static_cast<std::size_t>(p - 1)] * x.coord[0];
    wpow_[0] = 1.0;
    if (x.factors == 2) {
      for (int p = 1; p <= max_deg_[1]; ++p) wpow_[static_cast<std::size_t>(p)] = wpow_[static_cast<std::size_t>(p - 1)] * x.coord[1];
    }

    // S row-major: S(b, i) = s_[b*n + i].
    std::fill(s_.begin(), s_.end(), Complex(0.0));
    for (int c = 0; c < n; ++c) {
      Complex v = zpow_[static_cast<std::size_t>(e0_[static_cast<std::size_t>(c)])];
      if (x.factors == 2) v *= wpow_[static_cast<std::size_t>(e1_[static_cast<std::size_t>(c)])];
      Complex* srow = s_.data() + blocks_[static_cast<std::size_t>(c)] * n;
      const Complex* acol = a_ + static_cast<std::ptrdiff_t>(c) * n;  // column-major transform
      for (int i = 0; i < n; ++i) srow[i] += v * acol[i];
    }

    // M = S S^*, lower triangle, then in-place Cholesky M = L L^*.
    for (int p = 0; p < r; ++p) {
      const Complex* sp = s_.data() + p * n;
      for (int q = 0; q <= p; ++q) {
        const Complex* sq = s_.data() + q * n;
        Complex acc = 0.0;
        for (int i = 0; i < n; ++i) acc += sp[i] * std::conj(sq[i]);
        chol_[static_cast<std::size_t>(p * r + q)] = acc;
      }
    }
    for (int q = 0; q < r; ++q) {
      double d = chol_[static_cast<std::size_t>(q * r + q)].real();
      for (int p = 0; p < q; ++p) d -= std::norm(chol_[static_cast<std::size_t>(q * r + p)]);
      if (!(d > 0.0) || !std::isfinite(d)) {
        throw degenerate_point_error("section evaluation is rank-deficient at " +
                                     describe_point(x));
      }
      const double root = std::sqrt(d);
      chol_[static_cast<std::size_t>(q * r + q)] = root;
      for (int p = q + 1; p < r; ++p) {
        Complex acc = chol_[static_cast<std::size_t>(p * r + q)];
        for (int k = 0; k < q; ++k) {
          acc -= chol_[static_cast<std::size_t>(p * r + k)] *
                 std::conj(chol_[static_cast<std::size_t>(q * r + k)]);
        }
        chol_[static_cast<std::size_t>(p * r + q)] = acc / root;
      }
    }

    // B = M^{-1} S by forward then adjoint back substitution, all rows at once.
    std::copy(s_.begin(), s_.end(), b_.begin());
    for (int p = 0; p < r; ++p) {
      Complex* bp = b_.data() + p * n;
      for (int k = 0; k < p; ++k) {
        const Complex l = chol_[static_cast<std::size_t>(p * r + k)];
        const Complex* bk = b_.data() + k * n;
        for (int i = 0; i < n; ++i) bp[i] -= l * bk[i];
      }
      const double inv = 1.0 / chol_[static_cast<std::size_t>(p * r + p)].real();
      for (int i = 0; i < n; ++i) bp[i] *= inv;
    }
    for (int p = r - 1; p >= 0; --p) {
      Complex* bp = b_.data() + p * n;
      for (int k = p + 1; k < r; ++k) {
        const Complex l = std::conj(chol_[static_cast<std::size_t>(k * r + p)]);
        const Complex* bk = b_.data() + k * n;
        for (int i = 0; i < n; ++i) bp[i] -= l * bk[i];
      }
      const double inv = 1.0 / chol_[static_cast<std::size_t>(p * r + p)].real();
      for (int i = 0; i < n; ++i) bp[i] *= inv;
    }

    // sum += w * P with P_{kj} = sum_a conj(S(a,k)) B(a,j).
    Complex* out = sum_.data();  // column-major (k, j) -> out[j*n + k]
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        Complex acc = 0.0;
        for (int p = 0; p < r; ++p) {
          acc += std::conj(s_[static_cast<std::size_t>(p * n + k)]) *
                 b_[static_cast<std::size_t>(p * n + j)];
        }
        out[static_cast<std::ptrdiff_t>(j) * n + k] += weight * acc;
      }
    }
  }

  const Eigen::MatrixXcd& sum() const { return sum_; }

 private:
  int r_;
  int n_;
  const Complex* a_;
  std::vector<int> blocks_, e0_, e1_;
  int max_deg_[2] = {0, 0};
  std::vector<Complex> zpow_, wpow_, s_, b_, chol_;
  Eigen::MatrixXcd sum_;
};

/// Accumulates sum of w * P over the slice [begin, end) of the leading
/// factor's radial index, iterating the remaining node indices natively.
Eigen::MatrixXcd projection_slice(const SectionBasis& basis, const Eigen::MatrixXcd& a,
                                  const QuadratureRule& rule, std::size_t begin,
                                  std::size_t end) {
  ProjectionAccumulator acc(basis, a);
  const FactorRule& f0 = rule.factor(0);
  if (rule.factor_count() == 1) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t l = 0; l < f0.phase.size(); ++l) {
        acc.add(ChartPoint{{f0.radius[i] * f0.phase[l], 0.0}, 1}, f0.radial_weight[i]);
      }
    }
  } else {
    const FactorRule& f1 = rule.factor(1);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t l = 0; l < f0.phase.size(); ++l) {
        const Complex z = f0.radius[i] * f0.phase[l];
        for (std::size_t j = 0; j < f1.radius.size(); ++j) {
          const double w = f0.radial_weight[i] * f1.radial_weight[j];
          for (std::size_t m = 0; m < f1.phase.size(); ++m) {
            acc.add(ChartPoint{{z, f1.radius[j] * f1.phase[m]}, 2}, w);
          }
        }
      }
    }
  }
  return acc.sum();
}

}  // namespace

GramMatrix gram_matrix(const SectionBasis& basis, const BasisTransform& transform,
                       const QuadratureRule& rule) {
  const int r = basis.spec.rank();
  const int n = basis.total();
  if (transform.size() != n) {
    throw std::invalid_argument("transform size does not match the section count");
  }
  const Eigen::MatrixXcd& a = transform.matrix();

  // Radial slices of the leading factor are integrated independently and
  // summed in slice order, so the reduction tree (and the result bits) do not
  // depend on the worker count.
  const std::size_t slices = rule.factor(0).radius.size();
  std::size_t workers = std::min<std::size_t>(std::thread::hardware_concurrency(), slices);
  if (workers == 0) workers = 1;
  if (rule.node_count() < 200'000) workers = 1;

  std::vector<Eigen::MatrixXcd> partial(slices);
  if (workers == 1) {
    for (std::size_t i = 0; i < slices; ++i) {
      partial[i] = projection_slice(basis, a, rule, i, i + 1);
    }
  } else {
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&, w]() {
        for (std::size_t i = w; i < slices; i += workers) {
          partial[i] = projection_slice(basis, a, rule, i, i + 1);
        }
      }));
    }
    for (auto& f : futures) f.get();
  }

  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(n, n);
  for (const Eigen::MatrixXcd& p : partial) total += p;

  // G_{jk} = (1/V) Int P_{kj}; symmetrize away quadrature roundoff.
  Eigen::MatrixXcd g = total.transpose() / rule.volume();
  g = 0.5 * (g + g.adjoint()).eval();
  return GramMatrix{std::move(g), r, n};
}

double balance_defect(const Eigen::MatrixXcd& gram, int rank, int sections) {
  const double target = static_cast<double>(rank) / static_cast<double>(sections);
  return (gram - target * Eigen::MatrixXcd::Identity(sections, sections)).norm();
}

double balance_defect(const GramMatrix& gram) {
  return balance_defect(gram.entries, gram.rank, gram.sections);
}

std::string to_string(Diagnosis d) {
  switch (d) {
    case Diagnosis::Balanced: return "Balanced";
    case Diagnosis::MaxIterations: return "MaxIterations";
    case Diagnosis::Degeneration: return "Degeneration";
  }
  return "Unknown";
}

namespace {

/// A <- G^{-1/2} A from an existing eigendecomposition of G.
BasisTransform apply_step(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>& es,
                          const BasisTransform& transform) {
  const Eigen::VectorXd ev = es.eigenvalues();
  Eigen::MatrixXcd inv_sqrt = es.eigenvectors() *
                              ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                              es.eigenvectors().adjoint();
  return BasisTransform::from_matrix(inv_sqrt * transform.matrix());
}

}  // namespace

BasisTransform iteration_step(const SectionBasis& basis, const BasisTransform& transform,
                              const QuadratureRule& rule, double floor_scale) {
  const GramMatrix g = gram_matrix(basis, transform, rule);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.entries);
  const double floor = floor_scale * g.sections;
  if (es.eigenvalues()(0) < floor) {
    throw degeneration_error("Gram matrix degenerated: smallest eigenvalue " +
                                 std::to_string(es.eigenvalues()(0)) + " below floor " +
                                 std::to_string(floor),
                             es.eigenvalues()(0));
  }
  return apply_step(es, transform);
}

BasisTransform initial_transform(int sections, const BalanceOptions& options) {
  if (options.init == InitialTransform::RandomUnitary) {
    return BasisTransform::random_unitary(sections, options.seed);
  }
  return BasisTransform::identity(sections);
}

BalanceResult find_balanced(const BundleSpec& spec, const BalanceOptions& options) {
  return find_balanced(spec, options, initial_transform(spec.total_sections(), options));
}

BalanceResult find_balanced(const BundleSpec& spec, const BalanceOptions& options,
                            const BasisTransform& initial) {
  const SectionBasis basis = h0_basis(spec);
  const QuadratureRule rule = quadrature_nodes(spec.base, options.quad_order);
  const double floor = options.degeneration_floor * basis.total();

  BalanceResult result;
  BasisTransform a = initial;
  for (int it = 0;; ++it) {
    const GramMatrix g = gram_matrix(basis, a, rule);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.entries);
    const double defect = balance_defect(g);
    result.defect_history.push_back(defect);
    result.min_eigenvalue_history.push_back(es.eigenvalues()(0));
    result.trace_history.push_back(g.entries.trace().real());
    result.iterations = it;
    result.gram_final = g.entries;
    result.final_transform = a;
    if (defect < options.tol) {
      result.converged = true;
      result.diagnosis = Diagnosis::Balanced;
      break;
    }
    if (es.eigenvalues()(0) < floor) {
      result.diagnosis = Diagnosis::Degeneration;
      break;
    }
    if (it == options.max_iter) {
      result.diagnosis = Diagnosis::MaxIterations;
      break;
    }
    a = apply_step(es, a);
  }
  return result;
}

BasisTransform concat_balanced(const BundleSpec& spec, const std::vector<BalanceResult>& factors) {
  if (factors.empty()) throw std::invalid_argument("no factor results to concatenate");
  if (static_cast<int>(factors.size()) != spec.rank()) {
    throw std::invalid_argument("expected one balanced factor result per summand");
  }
  for (std::size_t j = 0; j < factors.size(); ++j) {
    if (!factors[j].converged) {
      throw std::invalid_argument("factor " + std::to_string(j) +
                                  " is not a converged balance result");
    }
    if (factors[j].final_transform.size() != spec.sections_of(static_cast<int>(j))) {
      throw std::invalid_argument("factor " + std::to_string(j) +
                                  " transform size does not match the summand");
    }
  }
  if (factors.size() == 1) return factors[0].final_transform;

  const RatioCriterion rc = ratio_criterion(spec);
  if (!rc.holds) {
    std::ostringstream msg;
    msg << "section ratios differ (";
    for (std::size_t j = 0; j < rc.ratios.size(); ++j) {
      if (j) msg << ", ";
      msg << rc.ratios[j].first << "/" << rc.ratios[j].second;
    }
    msg << "); a direct sum with unequal r_j/N_j admits no balanced basis";
    throw std::invalid_argument(msg.str());
  }

  const int n = spec.total_sections();
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(n, n);
  int offset = 0;
  for (const BalanceResult& f : factors) {
    const int nj = f.final_transform.size();
    block.block(offset, offset, nj, nj) = f.final_transform.matrix();
    offset += nj;
  }
  return BasisTransform::from_matrix(std::move(block));
}

std::vector<Eigen::MatrixXcd> metric_samples(const SectionBasis& basis,
                                             const BasisTransform& transform,
                                             const std::vector<ChartPoint>& points) {
  const int r = basis.spec.rank();
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(points.size());
  for (const ChartPoint& x : points) {
    const EvaluationMatrix s = evaluate_sections(basis, transform, x);
    Eigen::MatrixXcd m = s.entries * s.entries.adjoint();
    const Eigen::LLT<Eigen::MatrixXcd> llt(m);
    if (!m.allFinite() || llt.info() != Eigen::Success) {
      throw degenerate_point_error("section evaluation is rank-deficient at " +
                                   describe_point(x));
    }
    out.push_back(llt.solve(Eigen::MatrixXcd::Identity(r, r)));
  }
  return out;
}

}  // namespace balmet
