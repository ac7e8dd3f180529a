#include <cmath>
#include <complex>
#include <numbers>

#include <doctest.h>

#include "balmet/embedding.hpp"
#include "balmet/metric.hpp"

using namespace balmet;

namespace {

constexpr double kPi = std::numbers::pi;

BundleSpec cp1_bundle(std::vector<int> twists) {
  std::vector<Twist> t;
  for (int k : twists) t.push_back(Twist{{k, 0}});
  return make_bundle(make_base(BaseKind::CP1, 1.0), std::move(t));
}

// Gram of the O(2) monomial basis, closed form. The pointwise products are
// z^j zbar^k / (1 + t + t^2) with t = |z|^2, so the diagonal entries are
// Int_0^inf t^j dt / ((1 + t + t^2)(1 + t)^2); partial fractions give
// Int_0^inf dt / ((1+t+t^2)(1+t)^2) = 1 - sqrt(3) pi / 9, and the middle
// entry follows from trace = 1.
const double kGramO2Outer = 1.0 - std::sqrt(3.0) * kPi / 9.0;    // 0.39540...
const double kGramO2Middle = 2.0 * std::sqrt(3.0) * kPi / 9.0 - 1.0;  // 0.20919...

BalanceOptions fast_options(int order) {
  BalanceOptions opts;
  opts.quad_order = order;
  return opts;
}

}  // namespace

TEST_CASE("pointwise projection on O(1)") {
  const SectionBasis o1 = h0_basis(cp1_bundle({1}));
  const BasisTransform id = BasisTransform::identity(2);

  const Eigen::MatrixXcd at0 =
      pointwise_projection(evaluate_sections(o1, id, cp1_point(0.0)));
  CHECK(std::abs(at0(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(at0(1, 1)) < 1e-15);
  CHECK(std::abs(at0(0, 1)) < 1e-15);

  const Eigen::MatrixXcd at1 =
      pointwise_projection(evaluate_sections(o1, id, cp1_point(1.0)));
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) CHECK(std::abs(at1(j, k) - 0.5) < 1e-15);
  }
}

TEST_CASE("projection law: idempotent with trace r") {
  const std::vector<BundleSpec> specs = {cp1_bundle({3}), cp1_bundle({1, 2}),
                                         cp1_bundle({2, 2}), parse_bundle("O(1,0)+O(0,1)")};
  for (const BundleSpec& spec : specs) {
    const SectionBasis basis = h0_basis(spec);
    const BasisTransform u = BasisTransform::random_unitary(basis.total(), 3);
    for (const ChartPoint& x : sample_points(spec.base, 100, 21, 2.0)) {
      const Eigen::MatrixXcd p = pointwise_projection(evaluate_sections(basis, u, x));
      CHECK((p * p - p).norm() < 1e-10);
      CHECK(std::abs(p.trace().real() - spec.rank()) < 1e-10);
      CHECK(std::abs(p.trace().imag()) < 1e-12);
    }
  }
}

TEST_CASE("rank-deficient evaluation is rejected") {
  EvaluationMatrix bad;
  bad.point = cp1_point(0.0);
  bad.entries = Eigen::MatrixXcd::Zero(1, 2);
  CHECK_THROWS_AS(pointwise_projection(bad), degenerate_point_error);
}

TEST_CASE("gram matrix of monomial bases") {
  const PolarizedBase cp1 = make_base(BaseKind::CP1, 1.0);
  const QuadratureRule rule = quadrature_nodes(cp1, 48);

  SUBCASE("O(1): monomials are already balanced") {
    const SectionBasis basis = h0_basis(cp1_bundle({1}));
    const GramMatrix g = gram_matrix(basis, BasisTransform::identity(2), rule);
    CHECK(std::abs(g.entries(0, 0) - 0.5) < 1e-13);
    CHECK(std::abs(g.entries(1, 1) - 0.5) < 1e-13);
    CHECK(std::abs(g.entries(0, 1)) < 1e-13);
    CHECK(balance_defect(g) < 1e-13);
  }

  SUBCASE("O(0): the constant section") {
    const SectionBasis basis = h0_basis(cp1_bundle({0}));
    const GramMatrix g = gram_matrix(basis, BasisTransform::identity(1), rule);
    CHECK(std::abs(g.entries(0, 0) - 1.0) < 1e-14);
  }

  SUBCASE("O(2): closed-form Gram and defect") {
    const SectionBasis basis = h0_basis(cp1_bundle({2}));
    const GramMatrix g = gram_matrix(basis, BasisTransform::identity(3), rule);
    CHECK(std::abs(g.entries(0, 0) - kGramO2Outer) < 1e-13);
    CHECK(std::abs(g.entries(1, 1) - kGramO2Middle) < 1e-13);
    CHECK(std::abs(g.entries(2, 2) - kGramO2Outer) < 1e-13);
    CHECK(std::abs(g.entries(0, 2)) < 1e-13);
    CHECK(std::abs(g.entries.trace().real() - 1.0) < 1e-12);

    const double third = 1.0 / 3.0;
    const double expected_defect = std::sqrt(2.0 * std::pow(kGramO2Outer - third, 2) +
                                             std::pow(kGramO2Middle - third, 2));
    CHECK(balance_defect(g) == doctest::Approx(expected_defect).epsilon(1e-10));
  }
}

TEST_CASE("balance defect basics") {
  Eigen::MatrixXcd g = 0.4 * Eigen::MatrixXcd::Identity(5, 5);
  CHECK(balance_defect(g, 2, 5) == 0.0);
  g(0, 0) = 0.5;
  CHECK(balance_defect(g, 2, 5) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("gram is invariant under scaling of the transform") {
  const SectionBasis basis = h0_basis(cp1_bundle({1, 2}));
  const QuadratureRule rule = quadrature_nodes(basis.spec.base, 24);
  const BasisTransform a = BasisTransform::random_unitary(5, 17);
  const GramMatrix g1 = gram_matrix(basis, a, rule);
  const BasisTransform scaled =
      BasisTransform::from_matrix(std::complex<double>(-2.5, 1.0) * a.matrix());
  const GramMatrix g2 = gram_matrix(basis, scaled, rule);
  CHECK((g1.entries - g2.entries).norm() < 1e-12);
}

TEST_CASE("trace law across specs and transforms") {
  const std::vector<BundleSpec> specs = {cp1_bundle({4}), cp1_bundle({1, 2}),
                                         parse_bundle("O(1,0)+O(0,1)")};
  for (const BundleSpec& spec : specs) {
    const SectionBasis basis = h0_basis(spec);
    const QuadratureRule rule = quadrature_nodes(spec.base, 16);
    for (std::uint64_t seed : {1ull, 2ull}) {
      const BasisTransform u = BasisTransform::random_unitary(basis.total(), seed);
      const GramMatrix g = gram_matrix(basis, u, rule);
      CHECK(std::abs(g.entries.trace().real() - spec.rank()) < 1e-9);
    }
  }
}

TEST_CASE("frame independence of the projection under the chart flip") {
  const std::vector<BundleSpec> specs = {cp1_bundle({2}), cp1_bundle({1, 2})};
  for (const BundleSpec& spec : specs) {
    const SectionBasis basis = h0_basis(spec);
    const BasisTransform u = BasisTransform::random_unitary(basis.total(), 5);
    for (const ChartPoint& x : sample_points(spec.base, 20, 13, 1.5)) {
      if (std::abs(x.z()) < 1e-3) continue;
      const ChartPoint flipped = cp1_point(1.0 / x.z());
      const Eigen::MatrixXcd p0 =
          pointwise_projection(evaluate_sections(basis, u, x, Chart::Affine));
      const Eigen::MatrixXcd p1 =
          pointwise_projection(evaluate_sections(basis, u, flipped, Chart::Opposite));
      CHECK((p0 - p1).norm() < 1e-10);
    }
  }
}

TEST_CASE("iteration step") {
  const QuadratureRule rule = quadrature_nodes(make_base(BaseKind::CP1, 1.0), 48);

  SUBCASE("O(0) fixes the trivial transform") {
    const SectionBasis basis = h0_basis(cp1_bundle({0}));
    const BasisTransform next = iteration_step(basis, BasisTransform::identity(1), rule);
    CHECK(std::abs(next.matrix()(0, 0) - 1.0) < 1e-12);
  }

  SUBCASE("balanced input is a fixed point") {
    const SectionBasis basis = h0_basis(cp1_bundle({1}));
    const BasisTransform id = BasisTransform::identity(2);
    const double before = balance_defect(gram_matrix(basis, id, rule));
    const BasisTransform next = iteration_step(basis, id, rule);
    const double after = balance_defect(gram_matrix(basis, next, rule));
    CHECK(std::abs(before - after) < 1e-12);
    CHECK((next.matrix() - id.matrix()).norm() < 1e-10);
  }

  SUBCASE("one step from the O(2) monomials shrinks the defect") {
    const SectionBasis basis = h0_basis(cp1_bundle({2}));
    const BasisTransform id = BasisTransform::identity(3);
    const double before = balance_defect(gram_matrix(basis, id, rule));
    const BasisTransform next = iteration_step(basis, id, rule);
    const double after = balance_defect(gram_matrix(basis, next, rule));
    CHECK(after < before);
    CHECK(after < 1.0 / 6.0);
    // The step moves toward the sqrt-binomial basis {1, sqrt(2) z, z^2}.
    const double mid_ratio = std::abs(next.matrix()(1, 1)) / std::abs(next.matrix()(0, 0));
    CHECK(mid_ratio > 1.0);
  }
}

TEST_CASE("the degeneration floor aborts the step") {
  const SectionBasis basis = h0_basis(cp1_bundle({2}));
  const QuadratureRule rule = quadrature_nodes(basis.spec.base, 24);
  // Raising the floor above the actual smallest eigenvalue (about 0.21 at the
  // monomial basis) must trip the degeneration signal.
  CHECK_THROWS_AS(iteration_step(basis, BasisTransform::identity(3), rule, 1.0),
                  degeneration_error);
}

TEST_CASE("the trivial bundle balances immediately") {
  const BalanceResult r = find_balanced(cp1_bundle({0}), fast_options(16));
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(std::abs(r.gram_final(0, 0) - 1.0) < 1e-12);
}

TEST_CASE("find_balanced on single twists") {
  const BalanceResult r = find_balanced(cp1_bundle({3}), fast_options(48));
  REQUIRE(r.converged);
  CHECK(r.diagnosis == Diagnosis::Balanced);
  CHECK(r.iterations < 50);
  const Eigen::MatrixXcd expected = 0.25 * Eigen::MatrixXcd::Identity(4, 4);
  CHECK((r.gram_final - expected).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(r.defect_history.back() < 1e-10);
  CHECK(std::abs(std::abs(r.final_transform.matrix().determinant()) - 1.0) < 1e-10);
}

TEST_CASE("find_balanced diagnoses the unequal-ratio sum") {
  BalanceOptions opts = fast_options(24);
  opts.max_iter = 150;
  const BalanceResult r = find_balanced(cp1_bundle({1, 2}), opts);
  CHECK_FALSE(r.converged);
  CHECK(r.diagnosis != Diagnosis::Balanced);
  for (const double d : r.defect_history) CHECK(d > 1e-3);
}

TEST_CASE("find_balanced on the product base") {
  const BalanceResult r = find_balanced(parse_bundle("O(1,0)+O(0,1)"), fast_options(12));
  REQUIRE(r.converged);
  CHECK(r.defect_history.back() < 1e-10);
}

TEST_CASE("concatenation of balanced factors") {
  SUBCASE("O(2) + O(2)") {
    const BalanceResult factor = find_balanced(cp1_bundle({2}), fast_options(48));
    REQUIRE(factor.converged);
    const BundleSpec sum = cp1_bundle({2, 2});
    const BasisTransform joint = concat_balanced(sum, {factor, factor});
    const GramMatrix g = gram_matrix(h0_basis(sum), joint,
                                     quadrature_nodes(sum.base, 48));
    CHECK(balance_defect(g) < 1e-9);
  }

  SUBCASE("single summand passes through") {
    const BalanceResult factor = find_balanced(cp1_bundle({2}), fast_options(32));
    const BasisTransform same = concat_balanced(cp1_bundle({2}), {factor});
    CHECK((same.matrix() - factor.final_transform.matrix()).norm() == 0.0);
  }

  SUBCASE("product base factors") {
    const BundleSpec sum = parse_bundle("O(1,0)+O(0,1)");
    const BundleSpec f1 = parse_bundle("O(1,0)");
    const BundleSpec f2 = parse_bundle("O(0,1)");
    const BalanceResult r1 = find_balanced(f1, fast_options(12));
    const BalanceResult r2 = find_balanced(f2, fast_options(12));
    REQUIRE(r1.converged);
    REQUIRE(r2.converged);
    const BasisTransform joint = concat_balanced(sum, {r1, r2});
    const GramMatrix g = gram_matrix(h0_basis(sum), joint, quadrature_nodes(sum.base, 12));
    CHECK(balance_defect(g) < 1e-9);
  }

  SUBCASE("unequal ratios are rejected") {
    const BalanceResult r1 = find_balanced(cp1_bundle({1}), fast_options(32));
    const BalanceResult r2 = find_balanced(cp1_bundle({2}), fast_options(32));
    REQUIRE(r1.converged);
    REQUIRE(r2.converged);
    CHECK_THROWS_WITH_AS(concat_balanced(cp1_bundle({1, 2}), {r1, r2}),
                         doctest::Contains("ratio"), std::invalid_argument);
  }

  SUBCASE("unconverged factors are rejected") {
    BalanceOptions opts = fast_options(16);
    opts.max_iter = 3;
    const BalanceResult bad = find_balanced(cp1_bundle({5}), opts);
    REQUIRE_FALSE(bad.converged);
    const BalanceResult good = find_balanced(cp1_bundle({5}), fast_options(32));
    CHECK_THROWS_AS(concat_balanced(cp1_bundle({5, 5}), {bad, good}), std::invalid_argument);
  }
}

TEST_CASE("metric samples") {
  const SectionBasis o1 = h0_basis(cp1_bundle({1}));
  const BasisTransform id = BasisTransform::identity(2);
  const auto samples = metric_samples(o1, id, {cp1_point(0.0), cp1_point(1.0)});
  CHECK(std::abs(samples[0](0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(samples[1](0, 0) - 0.5) < 1e-14);
}

TEST_CASE("balanced O(k) metric is the k-th Fubini-Study power") {
  const int k = 3;
  const BalanceResult r = find_balanced(cp1_bundle({k}), fast_options(48));
  REQUIRE(r.converged);
  const SectionBasis basis = h0_basis(cp1_bundle({k}));
  const std::vector<ChartPoint> pts = {cp1_point(0.0), cp1_point(0.7),
                                       cp1_point({-0.3, 1.1})};
  const auto h = metric_samples(basis, r.final_transform, pts);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double expected = std::pow((1.0 + std::norm(pts[0].z())) /
                                         (1.0 + std::norm(pts[i].z())),
                                     k);
    const double got = (h[i](0, 0) / h[0](0, 0)).real();
    CHECK(got == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("fixed points are exactly the balanced transforms") {
  const QuadratureRule rule = quadrature_nodes(make_base(BaseKind::CP1, 1.0), 48);
  const SectionBasis basis = h0_basis(cp1_bundle({2}));
  const std::vector<ChartPoint> pts = {cp1_point(0.0), cp1_point(0.9), cp1_point({0.2, -1.2})};

  auto sample_change = [&](const BasisTransform& a) {
    const BasisTransform next = iteration_step(basis, a, rule);
    const auto before = metric_samples(basis, a, pts);
    const auto after = metric_samples(basis, next, pts);
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      worst = std::max(worst, std::abs((after[i](0, 0) / after[0](0, 0) -
                                        before[i](0, 0) / before[0](0, 0))
                                           .real()));
    }
    return worst;
  };

  const BalanceResult balanced = find_balanced(cp1_bundle({2}), fast_options(48));
  REQUIRE(balanced.converged);
  CHECK(sample_change(balanced.final_transform) < 1e-10);
  CHECK(sample_change(BasisTransform::identity(3)) > 1e-3);
}

TEST_CASE("independent initializations reach the same metric") {
  BalanceOptions first = fast_options(48);
  first.init = InitialTransform::RandomUnitary;
  first.seed = 11;
  BalanceOptions second = first;
  second.seed = 22;

  const BalanceResult r1 = find_balanced(cp1_bundle({3}), first);
  const BalanceResult r2 = find_balanced(cp1_bundle({3}), second);
  REQUIRE(r1.converged);
  REQUIRE(r2.converged);
  CHECK((r1.final_transform.matrix() - r2.final_transform.matrix()).norm() > 1e-3);

  const SectionBasis basis = h0_basis(cp1_bundle({3}));
  const auto pts = sample_points(basis.spec.base, 20, 31, 1.5);
  const auto h1 = metric_samples(basis, r1.final_transform, pts);
  const auto h2 = metric_samples(basis, r2.final_transform, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::complex<double> d1 = h1[i](0, 0) / h1[0](0, 0);
    const std::complex<double> d2 = h2[i](0, 0) / h2[0](0, 0);
    CHECK(std::abs(d1 - d2) <= 1e-8 * std::max(1.0, std::abs(d1)));
  }
}

TEST_CASE("balance history is serialized consistently") {
  const BalanceResult r = find_balanced(cp1_bundle({2}), fast_options(32));
  CHECK(r.defect_history.size() == r.min_eigenvalue_history.size());
  CHECK(r.defect_history.size() == r.trace_history.size());
  CHECK(r.defect_history.size() == static_cast<std::size_t>(r.iterations) + 1);
}
