#include <benchmark/benchmark.h>

#include <random>

#include "mfbm3d/transforms.hpp"

using namespace mfbm3d;

namespace {

std::vector<double> random_values(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-100, 100);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

void BM_Forward2d(benchmark::State& state) {
  const Basis basis = static_cast<Basis>(state.range(0));
  PatchValues p;
  const auto v = random_values(kPatchArea);
  std::copy(v.begin(), v.end(), p.begin());
  for (auto _ : state) {
    PatchValues c = p;
    forward_2d(c, basis);
    benchmark::DoNotOptimize(c);
  }
  state.SetLabel(to_string(basis));
}
BENCHMARK(BM_Forward2d)->Arg(static_cast<int>(Basis::kBior15))->Arg(static_cast<int>(Basis::kDct));

void BM_Wht(benchmark::State& state) {
  const auto v = random_values(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto c = v;
    wht_1d(std::span<double>(c));
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_Wht)->RangeMultiplier(2)->Range(2, 32);

void BM_Forward3d(benchmark::State& state) {
  const auto g = random_values(static_cast<std::size_t>(state.range(0)) * kPatchArea);
  for (auto _ : state) {
    auto c = g;
    forward_3d(c, Basis::kBior15);
    hard_threshold(c, 27.0);
    inverse_3d(c, Basis::kBior15);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_Forward3d)->RangeMultiplier(2)->Range(1, 32);

}  // namespace
