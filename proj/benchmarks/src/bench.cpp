// Microbenchmarks for the hot paths: matrix exponentials, covariance flows,
// kernel evaluation, and the maximal-function scan.

#include <benchmark/benchmark.h>

#include <random>

#include "ousg/kernels.hpp"
#include "ousg/linalg.hpp"
#include "ousg/maximal.hpp"
#include "ousg/structure.hpp"

using namespace ousg;

namespace {

Matrix bench_drift(Eigen::Index d) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss;
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = gauss(rng);
  const Matrix skew = 0.5 * (a - a.transpose());
  return skew - Matrix::Identity(d, d);
}

OUParams bench_params(Eigen::Index d) {
  return make_ou_params(Matrix::Identity(d, d), bench_drift(d));
}

void BM_Expm(benchmark::State& state) {
  const Matrix b = bench_drift(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(expm(b));
}
BENCHMARK(BM_Expm)->Arg(2)->Arg(4)->Arg(8);

void BM_CovarianceAt(benchmark::State& state) {
  const OUParams p = bench_params(state.range(0));
  double t = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(covariance_at(p, t));
    t = t < 1.0 ? t * 1.1 : 0.01;
  }
}
BENCHMARK(BM_CovarianceAt)->Arg(2)->Arg(4);

void BM_KernelGeneral(benchmark::State& state) {
  const Eigen::Index d = state.range(0);
  const OUParams p = bench_params(d);
  const GeneralKernel k(p, 0.7);
  const Vector x = Vector::Constant(d, 0.4);
  const Vector y = Vector::Constant(d, -0.3);
  for (auto _ : state) benchmark::DoNotOptimize(k.at(x, y));
}
BENCHMARK(BM_KernelGeneral)->Arg(2)->Arg(4)->Arg(8);

void BM_KernelBlock(benchmark::State& state) {
  const Eigen::Index d = state.range(0);
  std::vector<double> theta;
  for (Eigen::Index j = 0; j < d / 2; ++j) theta.push_back(1.0 + double(j));
  const BlockSpec spec = make_block_spec(theta, d);
  const Vector x = Vector::Constant(d, 0.4);
  const Vector y = Vector::Constant(d, -0.3);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_block(spec, 0.7, x, y));
}
BENCHMARK(BM_KernelBlock)->Arg(2)->Arg(4)->Arg(8);

void BM_ApplySemigroup(benchmark::State& state) {
  const OUParams p = bench_params(2);
  GaussianBump f;
  f.center = Vector::Zero(2);
  f.sigma = 0.5;
  const Vector x = Vector::Constant(2, 0.3);
  const auto fn = [&](const Vector& y) { return f(y); };
  for (auto _ : state)
    benchmark::DoNotOptimize(apply_semigroup(p, 0.8, fn, x, state.range(0)));
}
BENCHMARK(BM_ApplySemigroup)->Arg(16)->Arg(48);

void BM_MaximalScan(benchmark::State& state) {
  const OUParams p = bench_params(2);
  GaussianBump f;
  f.center = Vector::Zero(2);
  f.sigma = 0.5;
  const Vector x = Vector::Constant(2, 0.6);
  const TimeSet times = translate_schedule(TimeSetKind::kInterval, 1.0, 1.0,
                                           0.0, {0.1, 0.2},
                                           int(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(maximal_scan(p, f, x, times, 32));
}
BENCHMARK(BM_MaximalScan)->Arg(16)->Arg(64);

void BM_SkewCanonical(benchmark::State& state) {
  const Eigen::Index d = state.range(0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = gauss(rng);
  const Matrix r = 0.5 * (a - a.transpose());
  for (auto _ : state) benchmark::DoNotOptimize(skew_canonical_form(r));
}
BENCHMARK(BM_SkewCanonical)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
