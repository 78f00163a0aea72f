#include <benchmark/benchmark.h>

#include <numbers>

#include "nclab/averages.hpp"
#include "nclab/random.hpp"

using namespace nclab;

namespace {

struct Setup {
  AlgebraPtr alg;
  std::vector<AbsoluteContraction> maps;
  Weight weight;
  Element x;
};

Setup make_setup(int d, int n) {
  RandomStream rng(42, "bench-averages");
  Setup s;
  s.alg = Algebra::full(n);
  for (int i = 0; i < d; ++i) {
    KrausSpec k;
    k.operators.push_back(random_unitary(s.alg, rng) * std::sqrt(0.5));
    k.operators.push_back(random_unitary(s.alg, rng) * std::sqrt(0.5));
    s.maps.push_back(construct_contraction(s.alg, std::move(k)));
  }
  std::vector<TrigTerm> terms;
  for (int j = 0; j < 3; ++j) {
    TrigTerm t{rng.complex_normal(), {}};
    for (int i = 0; i < d; ++i) t.phases.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    terms.push_back(std::move(t));
  }
  s.weight = TrigPolynomial(d, std::move(terms));
  s.x = random_general(s.alg, rng);
  return s;
}

void BM_Direct(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0)), upper = static_cast<int>(state.range(1));
  const Setup s = make_setup(d, 3);
  const MultiIndex n = MultiIndex::constant(d, upper);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_average_direct(s.weight, s.maps, s.x, n));
  state.counters["points"] = static_cast<double>(n.cardinality());
}
BENCHMARK(BM_Direct)->Args({1, 256})->Args({2, 32})->Args({3, 12})->Unit(benchmark::kMicrosecond);

void BM_Factorized(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0)), upper = static_cast<int>(state.range(1));
  const Setup s = make_setup(d, 3);
  const MultiIndex n = MultiIndex::constant(d, upper);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_average_factorized(s.weight, s.maps, s.x, n));
}
BENCHMARK(BM_Factorized)->Args({1, 256})->Args({2, 32})->Args({3, 12})->Unit(benchmark::kMicrosecond);

// Whole box of averages at once; threads only split the prefix-sum lines.
void BM_Grid(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0)), upper = static_cast<int>(state.range(1));
  const int threads = static_cast<int>(state.range(2));
  const Setup s = make_setup(d, 4);
  const Box box = Box::cube(d, 1, upper);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weighted_average_grid(s.weight, s.maps, s.x, box, {kDefaultBudget, threads}));
  }
  state.counters["boxes"] = static_cast<double>(box.size());
}
BENCHMARK(BM_Grid)
    ->Args({2, 32, 1})
    ->Args({2, 64, 1})
    ->Args({2, 64, 4})
    ->Args({3, 16, 1})
    ->Args({3, 16, 4})
    ->Unit(benchmark::kMillisecond);

void BM_LimitOracle(benchmark::State& state) {
  const Setup s = make_setup(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(limit_oracle(*s.weight.trig(), s.maps, s.x));
}
BENCHMARK(BM_LimitOracle)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
