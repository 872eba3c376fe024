#include "omegares/exactla.hpp"
#include "omegares/groups.hpp"
#include "omegares/omega.hpp"
#include "omegares/torus.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace omegares;

static void BM_rank(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  Matrix a(3, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = static_cast<Residue>(rng() % 3);
  for (auto _ : state) benchmark::DoNotOptimize(rank(a));
}
BENCHMARK(BM_rank)->Arg(32)->Arg(128)->Arg(256);

static void BM_group_resolution(benchmark::State& state) {
  auto g = symmetric_group(3);
  for (auto _ : state) {
    auto st = build_omega_resolution(group_loop_system(g, 3), group_ring_target(),
                                     static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(st.betti());
  }
}
BENCHMARK(BM_group_resolution)->Arg(4)->Arg(8);

static void BM_sullivan(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(sullivan_complex(5, 4, static_cast<std::size_t>(state.range(0))).betti);
}
BENCHMARK(BM_sullivan)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_torus_builder(benchmark::State& state) {
  auto g = TorusExtensionGroup::from_matrices(3, 2, 2, {{-1, 0, 0, -1}});
  for (auto _ : state) benchmark::DoNotOptimize(finite_length_builder(g, 9).betti);
}
BENCHMARK(BM_torus_builder)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
