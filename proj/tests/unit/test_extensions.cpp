#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "mfbm3d/extensions.hpp"
#include "mfbm3d/poisson.hpp"
#include "mfbm3d/simeval.hpp"
#include "mfbm3d/vst.hpp"
#include "oracles.hpp"

using namespace mfbm3d;

namespace {

FrameStack poisson_stack(const Frame& clean, double peak, int frames, std::uint64_t seed) {
  return add_poisson(clean, NoiseSpec{peak, frames, seed});
}

DenoiseOptions fast_options() {
  DenoiseOptions o;
  o.engine.step1.stride = 4;
  o.engine.step2.stride = 4;
  o.engine.step1.search_radius = 8;
  o.engine.step2.search_radius = 8;
  return o;
}

}  // namespace

TEST(AverageFrames, Examples) {
  const Frame f = oracle::random_frame(12, 10, 1);
  const Frame avg = average_frames(FrameStack(std::vector<Frame>(4, f)));
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(avg.values()[i], f.values()[i], 1e-12);
  const Frame half = average_frames(FrameStack({Frame(8, 8, 0.0), Frame(8, 8, 2.0)}));
  for (double v : half.values()) EXPECT_EQ(v, 1.0);
  EXPECT_THROW(average_frames(FrameStack{}), std::invalid_argument);
}

TEST(AverageFrames, VarianceOfMeanMonteCarlo) {
  // lambda 10, 10 frames: the mean has variance lambda / L = 1.
  const int n = 64 * 64;
  std::vector<Frame> fs;
  for (int l = 0; l < 10; ++l) {
    PoissonSampler s(17, static_cast<std::uint64_t>(l));
    Frame f(64, 64);
    for (double& v : f.values()) v = static_cast<double>(s(10.0));
    fs.push_back(std::move(f));
  }
  const Frame m = average_frames(FrameStack(fs));
  double s = 0.0, s2 = 0.0;
  for (double v : m.values()) s += v, s2 += v * v;
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_NEAR(var, 1.0, 0.1);
}

TEST(MethodNames, RoundTrip) {
  for (auto k : {MethodKind::kBm3d1, MethodKind::kBm3d2, MethodKind::kBm3d3, MethodKind::kBm3d4,
                 MethodKind::kBm3d4Sigma})
    EXPECT_EQ(method_kind_from_string(to_string(k)), k);
  EXPECT_THROW(method_kind_from_string("bm3d5"), std::invalid_argument);
  EXPECT_EQ(Method::bm3d4_sigma(120).name(), "bm3d4_sigma");
}

TEST(Denoise, SingleFrameDegenerationIsBitwise) {
  const Frame clean = oracle::synthetic_scene(40, 40);
  const FrameStack one = poisson_stack(clean, 3.0, 1, 5);
  const DenoiseOptions o = fast_options();
  const Frame a = denoise(one, Method::bm3d1(), o);
  EXPECT_EQ(a, denoise(one, Method::bm3d2(), o));
  EXPECT_EQ(a, denoise(one, Method::bm3d3(0), o));
  EXPECT_EQ(a, denoise(one, Method::bm3d4(), o));
  EXPECT_EQ(a, denoise_single(one[0], o));
}

TEST(Denoise, Bm3d3ReferenceOutOfRange) {
  const FrameStack s = poisson_stack(oracle::synthetic_scene(24, 24), 2.0, 3, 1);
  EXPECT_THROW(denoise(s, Method::bm3d3(3), fast_options()), std::invalid_argument);
  EXPECT_THROW(denoise(s, Method::bm3d3(-1), fast_options()), std::invalid_argument);
  EXPECT_THROW(denoise(FrameStack{}, Method::bm3d4(), fast_options()), std::invalid_argument);
}

// bm3d2 averages in the intensity domain after each frame's inverse VST.
TEST(Denoise, Bm3d2IsAverageOfSingleFrameEstimates) {
  const FrameStack s = poisson_stack(oracle::synthetic_scene(32, 32), 4.0, 3, 2);
  const DenoiseOptions o = fast_options();
  std::vector<Frame> per;
  for (const auto& f : s) per.push_back(denoise_single(f, o));
  EXPECT_EQ(denoise(s, Method::bm3d2(), o), average_frames(FrameStack(per)));
}

// bm3d1 stabilises the mean image, treating its noise as unit variance.
TEST(Denoise, Bm3d1IsSingleFrameOfAverage) {
  const FrameStack s = poisson_stack(oracle::synthetic_scene(32, 32), 4.0, 3, 3);
  const DenoiseOptions o = fast_options();
  EXPECT_EQ(denoise(s, Method::bm3d1(), o), denoise_single(average_frames(s), o));
}

// With Gaussian input and no stabilisation, bm3d4 is the bare engine.
TEST(Denoise, GaussianModeIsBareEngine) {
  std::vector<Frame> fs;
  for (int l = 0; l < 3; ++l) fs.push_back(oracle::random_frame(32, 32, 70 + l, 0.0, 100.0));
  const FrameStack s(fs);
  DenoiseOptions o = fast_options();
  o.stabilize = false;
  o.gaussian_sigma = 20.0;
  EngineConfig c = o.engine;
  c.sigma = 20.0;
  EXPECT_EQ(denoise(s, Method::bm3d4(), o), run_two_step(s, c));
}

TEST(Denoise, OutputIsNonNegativeCounts) {
  const FrameStack s = poisson_stack(oracle::synthetic_scene(32, 32), 1.0, 3, 4);
  for (const Method& m : {Method::bm3d1(), Method::bm3d2(), Method::bm3d3(1), Method::bm3d4(),
                          Method::bm3d4_sigma(95.0)}) {
    const Frame out = denoise(s, m, fast_options());
    for (double v : out.values()) EXPECT_GE(v, 0.0) << m.name();
  }
}

TEST(Denoise, FramePermutationBarelyChangesBm3d4) {
  const Frame clean = oracle::synthetic_scene(48, 48);
  const FrameStack s = poisson_stack(clean, 2.0, 4, 9);
  const DenoiseOptions o = fast_options();
  const double base = psnr(denoise(s, Method::bm3d4(), o), intensity_to_rate(clean, 2.0), 2.0);
  std::vector<int> order{0, 1, 2, 3};
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Frame> fs;
    for (int i : order) fs.push_back(s[static_cast<std::size_t>(i)]);
    const double p = psnr(denoise(FrameStack(fs), Method::bm3d4(), o), intensity_to_rate(clean, 2.0), 2.0);
    EXPECT_NEAR(p, base, 0.05);
  }
}

// bm3d4_sigma equals the stabilised engine run with the low-pass filtered
// counts as the step-1 match source, assembled here by hand.
TEST(Denoise, Bm3d4SigmaManualPipeline) {
  const FrameStack s = poisson_stack(oracle::synthetic_scene(32, 32), 3.0, 3, 6);
  const DenoiseOptions o = fast_options();
  VstState st;
  const FrameStack unit = rescale_to_unit(anscombe_forward(s), st);
  EngineConfig c = o.engine;
  c.sigma = st.sigma_rescaled;
  const Frame est = run_two_step(unit, lowpass(s, LowPassSpec{60.0}), c);
  EXPECT_EQ(denoise(s, Method::bm3d4_sigma(60.0), o), exact_unbiased_inverse_cf(rescale_back(est, st)));
  EXPECT_THROW(denoise(s, Method::bm3d4_sigma(0.0), o), std::invalid_argument);
}
