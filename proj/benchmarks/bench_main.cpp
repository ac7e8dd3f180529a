#include <benchmark/benchmark.h>

#include "balmet/embedding.hpp"
#include "balmet/gieseker.hpp"
#include "balmet/metric.hpp"

namespace {

using namespace balmet;

BundleSpec cp1_bundle(std::vector<int> twists) {
  std::vector<Twist> t;
  for (int k : twists) t.push_back(Twist{{k, 0}});
  return make_bundle(make_base(BaseKind::CP1, 1.0), std::move(t));
}

void BM_GramMatrix(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const BundleSpec spec = cp1_bundle({3});
  const SectionBasis basis = h0_basis(spec);
  const QuadratureRule rule = quadrature_nodes(spec.base, order);
  const BasisTransform u = BasisTransform::random_unitary(4, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gram_matrix(basis, u, rule));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rule.node_count()));
}
BENCHMARK(BM_GramMatrix)->Arg(16)->Arg(32)->Arg(64);

void BM_GramMatrixProductBase(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const BundleSpec spec = make_bundle(make_base(BaseKind::CP1xCP1, 1.0, 1.0),
                                      {Twist{{1, 0}}, Twist{{0, 1}}});
  const SectionBasis basis = h0_basis(spec);
  const QuadratureRule rule = quadrature_nodes(spec.base, order);
  const BasisTransform u = BasisTransform::random_unitary(4, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gram_matrix(basis, u, rule));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rule.node_count()));
}
BENCHMARK(BM_GramMatrixProductBase)->Arg(8)->Arg(16)->Arg(32);

void BM_BalanceToConvergence(benchmark::State& state) {
  const BundleSpec spec = cp1_bundle({static_cast<int>(state.range(0))});
  BalanceOptions opts;
  opts.quad_order = 32;
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_balanced(spec, opts));
  }
}
BENCHMARK(BM_BalanceToConvergence)->Arg(2)->Arg(4)->Arg(6);

void BM_GiesekerPoint(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const BundleSpec spec = cp1_bundle({k, k + 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(gieseker_point(spec));
  }
}
BENCHMARK(BM_GiesekerPoint)->Arg(4)->Arg(16)->Arg(64);

void BM_PluckerPotential(benchmark::State& state) {
  const BundleSpec spec = cp1_bundle({2, 3});
  const SectionBasis basis = h0_basis(spec);
  const BasisTransform u = BasisTransform::random_unitary(basis.total(), 2);
  const auto points = sample_points(spec.base, 64, 3, 1.5);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(potential_routes(basis, u, points[i++ % points.size()]));
  }
}
BENCHMARK(BM_PluckerPotential);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
