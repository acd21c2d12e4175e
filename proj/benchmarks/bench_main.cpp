#include <benchmark/benchmark.h>

#include <random>

#include "arakelab/exact_linalg.hpp"
#include "arakelab/experiments.hpp"
#include "arakelab/lattice.hpp"
#include "arakelab/sections.hpp"
#include "arakelab/torus.hpp"

using namespace arakelab;

namespace {

const HomogeneousPolynomial& plane() {
  static const HomogeneousPolynomial f = parse_poly("x0+x1+x2");
  return f;
}

void BM_FsubGram(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fsub_gram_matrix(plane(), k));
}
BENCHMARK(BM_FsubGram)->Arg(8)->Arg(16)->Arg(25);

void BM_LeadingLogDetsFloat(benchmark::State& state) {
  const RatMatrix g = to_rational(fsub_gram_matrix(plane(), static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(leading_log_dets_float(g, 128));
}
BENCHMARK(BM_LeadingLogDetsFloat)->Arg(8)->Arg(16)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_LeadingLogDetsExact(benchmark::State& state) {
  const IntMatrix g = fsub_gram_matrix(plane(), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(leading_log_dets_exact(g, 128));
}
BENCHMARK(BM_LeadingLogDetsExact)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_QuotientLattice(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const SectionSpace S(2, k);
  for (auto _ : state) benchmark::DoNotOptimize(hypersurface_quotient(plane(), k, S));
}
BENCHMARK(BM_QuotientLattice)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_PointCount(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const EuclideanLattice Q = hypersurface_quotient(plane(), k, SectionSpace(2, k));
  EnumerationOptions opts;
  opts.path = state.range(1) ? EnumerationPath::CertifiedFloat : EnumerationPath::Exact;
  for (auto _ : state) benchmark::DoNotOptimize(h0_count(Q, opts));
}
BENCHMARK(BM_PointCount)->Args({4, 0})->Args({4, 1})->Args({6, 0})->Args({6, 1})->Unit(benchmark::kMillisecond);

void BM_HeightTarget(benchmark::State& state) {
  QuadratureOptions opts;
  opts.grid = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(height_target(plane(), opts));
}
BENCHMARK(BM_HeightTarget)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_RawGrid(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(raw_grid_height(plane(), state.range(0), 0));
}
BENCHMARK(BM_RawGrid)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Bareiss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> d(-9, 9);
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = d(rng);
  for (auto _ : state) benchmark::DoNotOptimize(bareiss_determinant(m));
}
BENCHMARK(BM_Bareiss)->Arg(16)->Arg(32)->Arg(64);

}  // namespace
BENCHMARK_MAIN();
