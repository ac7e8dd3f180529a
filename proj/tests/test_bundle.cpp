#include <complex>

#include <doctest.h>

#include "balmet/bundle.hpp"
#include "balmet/embedding.hpp"

using namespace balmet;

namespace {

BundleSpec cp1_bundle(std::vector<int> twists) {
  std::vector<Twist> t;
  for (int k : twists) t.push_back(Twist{{k, 0}});
  return make_bundle(make_base(BaseKind::CP1, 1.0), std::move(t));
}

}  // namespace

TEST_CASE("section counts and labels") {
  const SectionBasis o2 = h0_basis(cp1_bundle({2}));
  REQUIRE(o2.total() == 3);
  CHECK(o2.labels[0].summand == 0);
  CHECK(o2.labels[0].exponent[0] == 0);
  CHECK(o2.labels[1].exponent[0] == 1);
  CHECK(o2.labels[2].exponent[0] == 2);

  const SectionBasis mixed = h0_basis(cp1_bundle({1, 2}));
  REQUIRE(mixed.total() == 5);
  CHECK(mixed.block_offsets == std::vector<int>{0, 2});
  CHECK(mixed.spec.sections_of(0) == 2);
  CHECK(mixed.spec.sections_of(1) == 3);

  const BundleSpec prod = parse_bundle("O(1,0)+O(0,1)");
  const SectionBasis pb = h0_basis(prod);
  REQUIRE(pb.total() == 4);
  CHECK(pb.block_offsets == std::vector<int>{0, 2});
  // Block 0 is {1, z}; block 1 is {1, w}.
  CHECK(pb.labels[1].exponent[0] == 1);
  CHECK(pb.labels[1].exponent[1] == 0);
  CHECK(pb.labels[3].exponent[0] == 0);
  CHECK(pb.labels[3].exponent[1] == 1);
}

TEST_CASE("label counts match the closed-form dimension") {
  for (int k = 0; k <= 12; ++k) {
    CHECK(h0_basis(cp1_bundle({k})).total() == k + 1);
  }
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; b <= 5; ++b) {
      const BundleSpec spec =
          make_bundle(make_base(BaseKind::CP1xCP1, 1.0, 1.0), {Twist{{a, b}}});
      CHECK(h0_basis(spec).total() == (a + 1) * (b + 1));
    }
  }
}

TEST_CASE("evaluation at specific points") {
  const SectionBasis o1 = h0_basis(cp1_bundle({1}));
  const BasisTransform id2 = BasisTransform::identity(2);
  const EvaluationMatrix at0 = evaluate_sections(o1, id2, cp1_point(0.0));
  CHECK(at0.entries(0, 0) == std::complex<double>(1.0));
  CHECK(at0.entries(0, 1) == std::complex<double>(0.0));
  const EvaluationMatrix at2 = evaluate_sections(o1, id2, cp1_point(2.0));
  CHECK(at2.entries(0, 1) == std::complex<double>(2.0));

  const SectionBasis o1o1 = h0_basis(cp1_bundle({1, 1}));
  const std::complex<double> i(0.0, 1.0);
  const EvaluationMatrix m = evaluate_sections(o1o1, BasisTransform::identity(4), cp1_point(i));
  CHECK(m.entries(0, 0) == std::complex<double>(1.0));
  CHECK(m.entries(0, 1) == i);
  CHECK(m.entries(1, 2) == std::complex<double>(1.0));
  CHECK(m.entries(1, 3) == i);
  CHECK(m.entries(0, 2) == std::complex<double>(0.0));
  CHECK(m.entries(1, 0) == std::complex<double>(0.0));
}

TEST_CASE("reference evaluation has the block-zero pattern and full rank") {
  const std::vector<BundleSpec> specs = {cp1_bundle({3}), cp1_bundle({1, 2}),
                                         cp1_bundle({0, 3}), parse_bundle("O(1,0)+O(0,1)"),
                                         parse_bundle("O(1,1)+O(2,0)")};
  for (const BundleSpec& spec : specs) {
    const SectionBasis basis = h0_basis(spec);
    const BasisTransform id = BasisTransform::identity(basis.total());
    const auto points = sample_points(spec.base, 100, 7, 2.0);
    for (const ChartPoint& x : points) {
      const EvaluationMatrix s = evaluate_sections(basis, id, x);
      for (int c = 0; c < basis.total(); ++c) {
        const int blk = basis.labels[static_cast<std::size_t>(c)].summand;
        for (int row = 0; row < spec.rank(); ++row) {
          if (row != blk) CHECK(s.entries(row, c) == std::complex<double>(0.0));
        }
      }
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s.entries);
      CHECK(svd.singularValues()(spec.rank() - 1) > 1e-12);
    }
  }
}

TEST_CASE("opposite chart flips monomial exponents") {
  const SectionBasis o1 = h0_basis(cp1_bundle({1}));
  const BasisTransform id = BasisTransform::identity(2);
  // In the 1/z coordinate at zeta = 0 the section z is the frame section.
  const EvaluationMatrix s = evaluate_sections(o1, id, cp1_point(0.0), Chart::Opposite);
  CHECK(s.entries(0, 0) == std::complex<double>(0.0));
  CHECK(s.entries(0, 1) == std::complex<double>(1.0));
}

TEST_CASE("ratio criterion is exact") {
  const RatioCriterion equal = ratio_criterion(cp1_bundle({2, 2}));
  CHECK(equal.holds);
  CHECK(equal.ratios[0] == std::pair<std::int64_t, std::int64_t>{1, 3});

  const RatioCriterion unequal = ratio_criterion(cp1_bundle({1, 2}));
  CHECK_FALSE(unequal.holds);
  CHECK(unequal.ratios[0] == std::pair<std::int64_t, std::int64_t>{1, 2});
  CHECK(unequal.ratios[1] == std::pair<std::int64_t, std::int64_t>{1, 3});

  CHECK(ratio_criterion(parse_bundle("O(1,0)+O(0,1)")).holds);
  CHECK_FALSE(ratio_criterion(parse_bundle("O(1,1)+O(0,1)")).holds);
  CHECK(ratio_criterion(cp1_bundle({4})).holds);
}

TEST_CASE("bundle grammar") {
  const BundleSpec two = parse_bundle("O(2)+O(2)");
  CHECK(two.base.kind == BaseKind::CP1);
  CHECK(two.rank() == 2);
  CHECK(two.summands[1].deg[0] == 2);

  const BundleSpec prod = parse_bundle(" O( 1 , 0 )+ O(0,1) ");
  CHECK(prod.base.kind == BaseKind::CP1xCP1);
  CHECK(prod.rank() == 2);

  CHECK(parse_bundle("O(0)").total_sections() == 1);
  CHECK(parse_bundle("O(12)", BaseKind::CP1).total_sections() == 13);
}

TEST_CASE("grammar errors carry the byte offset") {
  CHECK_THROWS_AS(parse_bundle("O(1)+O(1,1)"), parse_error);
  try {
    parse_bundle("P(2)");
  } catch (const parse_error& e) {
    CHECK(e.offset == 0);
  }
  try {
    parse_bundle("O(2)+O[3]");
  } catch (const parse_error& e) {
    CHECK(e.offset == 6);
  }
  CHECK_THROWS_AS(parse_bundle(""), parse_error);
  CHECK_THROWS_AS(parse_bundle("O(2)+"), parse_error);
  CHECK_THROWS_AS(parse_bundle("O(2)rest"), parse_error);
  CHECK_THROWS_AS(parse_bundle("O(-1)"), std::range_error);
  CHECK_THROWS_AS(parse_bundle("O(1,-2)"), std::range_error);
  CHECK_THROWS_AS(parse_bundle("O(2)", BaseKind::CP1xCP1), std::invalid_argument);
}

TEST_CASE("bundle validation") {
  CHECK_THROWS_AS(make_bundle(make_base(BaseKind::CP1, 1.0), {}), std::invalid_argument);
  CHECK_THROWS_AS(make_bundle(make_base(BaseKind::CP1, 1.0), {Twist{{-1, 0}}}),
                  std::range_error);
}

TEST_CASE("singular transforms are rejected") {
  Eigen::MatrixXcd singular = Eigen::MatrixXcd::Zero(2, 2);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(BasisTransform::from_matrix(singular), std::invalid_argument);
  CHECK_THROWS_AS(BasisTransform::from_matrix(Eigen::MatrixXcd::Zero(3, 3)),
                  std::invalid_argument);

  const SectionBasis o1 = h0_basis(cp1_bundle({1}));
  CHECK_THROWS_AS(evaluate_sections(o1, BasisTransform::identity(3), cp1_point(0.0)),
                  std::invalid_argument);
}

TEST_CASE("transforms are normalized to unit determinant") {
  Eigen::MatrixXcd m = 5.0 * Eigen::MatrixXcd::Identity(3, 3);
  const BasisTransform t = BasisTransform::from_matrix(m);
  CHECK(std::abs(t.matrix().determinant()) == doctest::Approx(1.0).epsilon(1e-12));
  const BasisTransform u = BasisTransform::random_unitary(4, 9);
  CHECK(std::abs(u.matrix().determinant()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((u.matrix().adjoint() * u.matrix() - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);
}
