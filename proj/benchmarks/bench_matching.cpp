#include <benchmark/benchmark.h>

#include <random>

#include "mfbm3d/matching.hpp"

using namespace mfbm3d;

namespace {

FrameStack random_stack(int size, int frames) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 255);
  std::vector<Frame> fs;
  for (int f = 0; f < frames; ++f) {
    Frame fr(size, size);
    for (double& v : fr.values()) v = u(rng);
    fs.push_back(std::move(fr));
  }
  return FrameStack(std::move(fs));
}

void BM_FindSimilarRow(benchmark::State& state) {
  const int frames = static_cast<int>(state.range(0));
  const FrameStack s = random_stack(128, frames);
  SearchConfig cfg;
  cfg.frame_scope = FrameScope::all();
  const auto cols = reference_positions(128, cfg.stride);
  for (auto _ : state) benchmark::DoNotOptimize(find_similar_row(0, 60, cols, s, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cols.size()));
}
BENCHMARK(BM_FindSimilarRow)->Arg(1)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
