#include <benchmark/benchmark.h>

#include <cmath>

#include "mfbm3d/extensions.hpp"
#include "mfbm3d/simeval.hpp"

using namespace mfbm3d;

namespace {

Frame scene(int size) {
  Frame f(size, size);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) f(r, c) = 100.0 + 80.0 * std::sin(r * 0.11) * std::cos(c * 0.07);
  return f;
}

void BM_Denoise(benchmark::State& state) {
  const auto kind = static_cast<MethodKind>(state.range(0));
  const int frames = static_cast<int>(state.range(1));
  const FrameStack s = add_poisson(scene(128), NoiseSpec{2.0, frames, 1});
  const Method m{kind, 0, 95.0};
  const DenoiseOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(denoise(s, m, o));
  state.SetLabel(m.name());
}
BENCHMARK(BM_Denoise)
    ->ArgsProduct({{static_cast<int>(MethodKind::kBm3d1), static_cast<int>(MethodKind::kBm3d2),
                    static_cast<int>(MethodKind::kBm3d3), static_cast<int>(MethodKind::kBm3d4),
                    static_cast<int>(MethodKind::kBm3d4Sigma)},
                   {5}})
    ->Unit(benchmark::kMillisecond)
    ->Iterations(1);

}  // namespace
