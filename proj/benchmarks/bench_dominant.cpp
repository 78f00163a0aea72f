#include <benchmark/benchmark.h>

#include "nclab/bau.hpp"
#include "nclab/maximal.hpp"
#include "nclab/random.hpp"

using namespace nclab;

namespace {

std::vector<Element> positive_family(const AlgebraPtr& alg, int k, std::uint64_t seed) {
  RandomStream rng(seed, "bench-dominant");
  std::vector<Element> f;
  for (int j = 0; j < k; ++j) f.push_back(random_positive(alg, rng) * rng.uniform(0.5, 1.5));
  return f;
}

void BM_DominantBarrier(benchmark::State& state) {
  const auto alg = Algebra::make({3, 2}, {1.0, 0.5});
  const auto f = positive_family(alg, static_cast<int>(state.range(0)), 1);
  const double p = static_cast<double>(state.range(1));
  DominantOptions opt;
  opt.method = DominantMethod::barrier;
  int iterations = 0;
  for (auto _ : state) {
    const auto r = dominant_element(f, p, opt);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.norm);
  }
  state.counters["solver_iterations"] = iterations;
}
BENCHMARK(BM_DominantBarrier)->Args({4, 2})->Args({16, 2})->Args({64, 2})->Args({16, 1})->Args({16, 4})
    ->Unit(benchmark::kMillisecond);

void BM_DominantProjectedDescent(benchmark::State& state) {
  const auto alg = Algebra::make({3, 2}, {1.0, 0.5});
  const auto f = positive_family(alg, static_cast<int>(state.range(0)), 2);
  DominantOptions opt;
  opt.method = DominantMethod::projected_descent;
  for (auto _ : state) benchmark::DoNotOptimize(dominant_element(f, 2.0, opt).norm);
}
BENCHMARK(BM_DominantProjectedDescent)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_DominantDiagonal(benchmark::State& state) {
  const auto alg = Algebra::diagonal(static_cast<int>(state.range(0)));
  RandomStream rng(3, "bench-diagonal");
  std::vector<Element> f;
  for (int j = 0; j < 32; ++j) f.push_back(random_diagonal_positive(alg, rng));
  for (auto _ : state) benchmark::DoNotOptimize(dominant_element(f, 2.0).norm);
}
BENCHMARK(BM_DominantDiagonal)->Arg(8)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_CertifyHermitianTail(benchmark::State& state) {
  const auto alg = Algebra::full(3);
  RandomStream rng(4, "bench-certify");
  std::vector<Element> tail;
  for (int j = 0; j < state.range(0); ++j) tail.push_back(random_hermitian(alg, rng) * (1.0 / (j + 1)));
  for (auto _ : state) benchmark::DoNotOptimize(certify_bau(tail, 2.0, 0.01).lambda);
}
BENCHMARK(BM_CertifyHermitianTail)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
