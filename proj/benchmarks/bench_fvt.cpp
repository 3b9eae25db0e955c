#include <memory>
#include <random>

#include <benchmark/benchmark.h>

#include "fvt/aca.hpp"
#include "fvt/bmatrix.hpp"
#include "fvt/btensor.hpp"
#include "fvt/problems.hpp"
#include "fvt/sampler.hpp"

using namespace fvt;

namespace {

Eigen::MatrixXd randn(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd M(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) M(i, j) = nd(rng);
  }
  return M;
}

InnerProduct dense_ip(std::size_t h) {
  const auto n = static_cast<Eigen::Index>(h);
  const Eigen::MatrixXd M = randn(n, n, 7);
  return InnerProduct::dense(M * M.transpose() / double(h) + Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

static void BM_MgsQr(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const BMatrix A(n, n, dense_ip(16), randn(16, Eigen::Index(n * n), 1));
  for (auto _ : state) benchmark::DoNotOptimize(mgs_qr(A));
}
BENCHMARK(BM_MgsQr)->Arg(8)->Arg(32)->Arg(64);

static void BM_Svd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const BMatrix A(n, n, InnerProduct::identity(16), randn(16, Eigen::Index(n * n), 2));
  for (auto _ : state) benchmark::DoNotOptimize(svd(A));
}
BENCHMARK(BM_Svd)->Arg(8)->Arg(32)->Arg(64);

static void BM_ModeMul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const BTensor A({n, n, n}, InnerProduct::identity(8), randn(8, Eigen::Index(n * n * n), 3));
  const Eigen::MatrixXd B = randn(Eigen::Index(n), Eigen::Index(n), 4);
  for (auto _ : state) benchmark::DoNotOptimize(mode_mul(A, 1, B));
}
BENCHMARK(BM_ModeMul)->Arg(10)->Arg(20)->Arg(30);

static void BM_Hosvd(benchmark::State& state) {
  FamilySpec s;
  s.family = Family::LowRankPlusDecay;
  s.dims = {20, 20, 20};
  EntryOracle oracle = make_oracle(s);
  const BTensor A = materialize(oracle);
  const auto r = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hosvd(A, {r, r, r}));
}
BENCHMARK(BM_Hosvd)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_TuckerAbc(benchmark::State& state) {
  FamilySpec s;
  s.family = Family::LowRankPlusDecay;
  s.dims = {30, 30, 30};
  AbcConfig cfg;
  cfg.n_iter = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    CachedOracle oracle(make_oracle(s));
    benchmark::DoNotOptimize(tucker_abc(oracle, cfg));
  }
}
BENCHMARK(BM_TuckerAbc)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_BumpOracle(benchmark::State& state) {
  EntryOracle oracle = make_oracle(default_bump_spec());
  MultiIndex idx = {10, 20, 30};
  for (auto _ : state) benchmark::DoNotOptimize(oracle(idx));
}
BENCHMARK(BM_BumpOracle);
BENCHMARK_MAIN();
