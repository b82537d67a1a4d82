#include <benchmark/benchmark.h>

#include "geoaug/entropic_ot.hpp"
#include "geoaug/measures.hpp"

namespace {

using namespace geoaug;

std::pair<DiscreteMeasure, DiscreteMeasure> gaussian_pair(std::size_t n, std::size_t d) {
  Vector shift = Vector::Zero(static_cast<Eigen::Index>(d));
  shift(0) = 2.0;
  const GaussianParams p0(Vector::Zero(static_cast<Eigen::Index>(d)), SpdMatrix::isotropic(d, 1.0));
  const GaussianParams p1(shift, SpdMatrix::isotropic(d, 1.5));
  return {DiscreteMeasure::uniform(sample_gaussian(p0, n, 1)),
          DiscreteMeasure::uniform(sample_gaussian(p1, n, 2))};
}

void BM_Sinkhorn(benchmark::State& state) {
  const auto [a, b] = gaussian_pair(static_cast<std::size_t>(state.range(0)), 2);
  SinkhornOptions o;
  o.epsilon = static_cast<double>(state.range(1)) * 1e-3;
  for (auto _ : state) {
    auto plan = sinkhorn(a, b, o);
    benchmark::DoNotOptimize(plan.coupling.data());
  }
}
BENCHMARK(BM_Sinkhorn)->Args({200, 10})->Args({1000, 10})->Args({1000, 1})->Unit(benchmark::kMillisecond);

void BM_DebiasedCost(benchmark::State& state) {
  const auto [a, b] = gaussian_pair(static_cast<std::size_t>(state.range(0)), 10);
  SinkhornOptions o;
  o.epsilon = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(debiased_transport_cost(a, b, o).value);
}
BENCHMARK(BM_DebiasedCost)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_CostMatrix(benchmark::State& state) {
  const auto [a, b] = gaussian_pair(static_cast<std::size_t>(state.range(0)), 10);
  for (auto _ : state) benchmark::DoNotOptimize(cost_matrix(a, b).values.data());
}
BENCHMARK(BM_CostMatrix)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);

}  // namespace
