#include <benchmark/benchmark.h>

#include "geoaug/classifier.hpp"
#include "geoaug/geodesic_augment.hpp"
#include "geoaug/measures.hpp"

namespace {

using namespace geoaug;

void BM_EstimateMap(benchmark::State& state) {
  const auto model = ConditionalGaussianModel::axis_aligned(2, 1.0, 1.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = DiscreteMeasure::uniform(sample_gaussian(model.class_conditional(-1), n, 1));
  const auto b = DiscreteMeasure::uniform(sample_gaussian(model.class_conditional(1), n, 2));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_map(a, b).images().data());
}
BENCHMARK(BM_EstimateMap)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_AugmentBatches(benchmark::State& state) {
  const auto data = sample_conditional_gaussian(ConditionalGaussianModel::axis_aligned(10, 1.0, 1.0),
                                                static_cast<std::size_t>(state.range(0)), 3);
  const auto objective = classifier_objective(mean_estimator(data), LossKind::logistic);
  AugmentConfig cfg;
  cfg.batch_size = 64;
  for (auto _ : state) benchmark::DoNotOptimize(augment_batches(data, objective, cfg).size());
}
BENCHMARK(BM_AugmentBatches)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

}  // namespace
