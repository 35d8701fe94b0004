// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to compare scaling.
#include <benchmark/benchmark.h>

#include <random>

#include "opalg/chain.hpp"
#include "opalg/embedding.hpp"
#include "opalg/generation.hpp"
#include "opalg/norms.hpp"
#include "opalg/subset_sum.hpp"

using namespace opalg;

namespace {

Matrix random_matrix(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(n, n, Backend::floating);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.set(i, j, cplx(u(rng), u(rng)));
  return m;
}

void BM_SvdSerial(benchmark::State& st) {
  const Matrix m = random_matrix(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(singular_values_serial(m));
}

void BM_SvdParallel(benchmark::State& st) {
  const Matrix m = random_matrix(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(singular_values_parallel(m));
}

void BM_BruteForceSerial(benchmark::State& st) {
  const auto a = sample_coefficients(static_cast<std::size_t>(st.range(0)), 1, 0);
  for (auto _ : st) benchmark::DoNotOptimize(brute_force_subset_sum_serial(a));
}

void BM_BruteForceParallel(benchmark::State& st) {
  const auto a = sample_coefficients(static_cast<std::size_t>(st.range(0)), 1, 0);
  for (auto _ : st) benchmark::DoNotOptimize(brute_force_subset_sum_parallel(a));
}

void BM_SemilatticeSerial(benchmark::State& st) {
  const Chain c = build_chain(ChainSpec::linear(static_cast<std::size_t>(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(verify_semilattice_serial(c));
}

void BM_SemilatticeParallel(benchmark::State& st) {
  const Chain c = build_chain(ChainSpec::linear(static_cast<std::size_t>(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(verify_semilattice(c));
}

void BM_GenerationSerial(benchmark::State& st) {
  const Chain c = build_chain(ChainSpec::linear(6));
  const auto f = orthogonal_atoms(c);
  const WeightSeq w = default_weights(f);
  for (auto _ : st) benchmark::DoNotOptimize(certify_generation_serial(f, w, 40));
}

void BM_GenerationParallel(benchmark::State& st) {
  const Chain c = build_chain(ChainSpec::linear(6));
  const auto f = orthogonal_atoms(c);
  const WeightSeq w = default_weights(f);
  for (auto _ : st) benchmark::DoNotOptimize(certify_generation(f, w, 40));
}

void BM_PhiSupSerial(benchmark::State& st) {
  const EmbeddedElement e = phi(sample_coefficients(10, 2, 0), SubsetFamily::canonical(10, 512, 8));
  for (auto _ : st) benchmark::DoNotOptimize(phi_sup_norm_serial(e));
}

void BM_PhiSupParallel(benchmark::State& st) {
  const EmbeddedElement e = phi(sample_coefficients(10, 2, 0), SubsetFamily::canonical(10, 512, 8));
  for (auto _ : st) benchmark::DoNotOptimize(phi_sup_norm(e));
}

void BM_EmbeddingSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(certify_embedding_bounds_serial(10, 512, 8, 10, 3));
}

void BM_EmbeddingParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(certify_embedding_bounds(10, 512, 8, 10, 3));
}

}  // namespace

BENCHMARK(BM_SvdSerial)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SvdParallel)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceSerial)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceParallel)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SemilatticeSerial)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SemilatticeParallel)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerationSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerationParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PhiSupSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PhiSupParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmbeddingSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmbeddingParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
