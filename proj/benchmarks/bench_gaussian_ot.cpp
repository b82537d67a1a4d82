#include <benchmark/benchmark.h>

#include "geoaug/gaussian_ot.hpp"

namespace {

using namespace geoaug;

GaussianParams random_gaussian(std::size_t d) {
  const Matrix a = Matrix::Random(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const Matrix cov = a * a.transpose() + Matrix::Identity(a.rows(), a.rows());
  return GaussianParams(Vector::Random(a.rows()), SpdMatrix::full(cov));
}

void BM_W2Full(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto p0 = random_gaussian(d), p1 = random_gaussian(d);
  for (auto _ : state) benchmark::DoNotOptimize(w2_gaussian_squared(p0, p1));
}
BENCHMARK(BM_W2Full)->Arg(2)->Arg(10)->Arg(50);

void BM_W2Isotropic(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const GaussianParams p0(Vector::Zero(static_cast<Eigen::Index>(d)), SpdMatrix::isotropic(d, 1.0));
  const GaussianParams p1(Vector::Ones(static_cast<Eigen::Index>(d)), SpdMatrix::isotropic(d, 2.0));
  for (auto _ : state) benchmark::DoNotOptimize(w2_gaussian_squared(p0, p1));
}
BENCHMARK(BM_W2Isotropic)->Arg(10)->Arg(1000);

void BM_Geodesic(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto p0 = random_gaussian(d), p1 = random_gaussian(d);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_geodesic(p0, p1, 0.3).params.mean.data());
}
BENCHMARK(BM_Geodesic)->Arg(2)->Arg(10)->Arg(50);

}  // namespace
