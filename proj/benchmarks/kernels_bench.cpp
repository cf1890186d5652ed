#include <benchmark/benchmark.h>

#include "spcg/genprob.hpp"
#include "spcg/kernels.hpp"

namespace {

using spcg::Accumulation;
using spcg::KernelConfig;

const spcg::CsrMatrix<double>& grid() {
  static const auto m = spcg::poisson3d(31, 31, 31);
  return m;
}

const spcg::SymHalfMatrix<double>& grid_half() {
  static const auto s = spcg::extract_lower(grid());
  return s;
}

KernelConfig config(const benchmark::State& state, Accumulation mode = Accumulation::kPrivatized) {
  return KernelConfig{static_cast<std::size_t>(state.range(0)), std::nullopt, mode};
}

void BM_SpmvFull(benchmark::State& state) {
  const auto& a = grid();
  const auto x = spcg::random_vector(a.n(), 1);
  spcg::DenseVector<double> y(a.n());
  const auto cfg = config(state);
  for (auto _ : state) {
    spcg::spmv_full<double>(a, x, y, cfg);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * a.nnz()));
}

void spmv_sym(benchmark::State& state, Accumulation mode) {
  const auto& s = grid_half();
  const auto x = spcg::random_vector(s.n(), 1);
  spcg::DenseVector<double> y(s.n());
  const auto cfg = config(state, mode);
  for (auto _ : state) {
    spcg::spmv_sym<double>(s, x, y, cfg);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * s.full_nnz()));
}

void BM_SpmvSymAtomic(benchmark::State& state) { spmv_sym(state, Accumulation::kAtomic); }
void BM_SpmvSymPrivatized(benchmark::State& state) { spmv_sym(state, Accumulation::kPrivatized); }

void BM_Dot(benchmark::State& state) {
  const auto u = spcg::random_vector(grid().n(), 2);
  const auto v = spcg::random_vector(grid().n(), 3);
  const auto cfg = config(state);
  for (auto _ : state) benchmark::DoNotOptimize(spcg::dot<double>(u, v, cfg));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * u.size()));
}

void BM_Axpy(benchmark::State& state) {
  const auto u = spcg::random_vector(grid().n(), 2);
  auto v = spcg::random_vector(grid().n(), 3);
  const auto cfg = config(state);
  for (auto _ : state) {
    spcg::axpy_inplace<double>(1e-9, u, v, cfg);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * u.size()));
}

}  // namespace

BENCHMARK(BM_SpmvFull)->RangeMultiplier(2)->Range(1, 8)->UseRealTime();
BENCHMARK(BM_SpmvSymAtomic)->RangeMultiplier(2)->Range(1, 8)->UseRealTime();
BENCHMARK(BM_SpmvSymPrivatized)->RangeMultiplier(2)->Range(1, 8)->UseRealTime();
BENCHMARK(BM_Dot)->RangeMultiplier(2)->Range(1, 8)->UseRealTime();
BENCHMARK(BM_Axpy)->RangeMultiplier(2)->Range(1, 8)->UseRealTime();
