#include <gtest/gtest.h>

#include <random>

#include "mfbm3d/engine.hpp"
#include "mfbm3d/errors.hpp"
#include "mfbm3d/simeval.hpp"
#include "oracles.hpp"

using namespace mfbm3d;

namespace {

EngineConfig single_frame_config(double sigma) {
  EngineConfig c;
  c.sigma = sigma;
  c.ref_scope = FrameScope::single(0);
  c.step1.frame_scope = FrameScope::single(0);
  c.step2.frame_scope = FrameScope::single(0);
  return c;
}

Frame add_gaussian(const Frame& clean, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sigma);
  Frame f = clean;
  for (double& v : f.values()) v += n(rng);
  return f;
}

}  // namespace

TEST(Aggregate, SingleContributionWeightCancels) {
  Accumulator acc(1, 1);
  acc.add(0, 0, 5.0, 2.0);
  EXPECT_EQ(aggregate(acc)(0, 0), 5.0);
}

TEST(Aggregate, WeightedMean) {
  Accumulator acc(1, 1);
  acc.add(0, 0, 0.0, 1.0);
  acc.add(0, 0, 4.0, 3.0);
  EXPECT_EQ(aggregate(acc)(0, 0), 3.0);
}

TEST(Aggregate, EmptyOrUncoveredIsAnError) {
  EXPECT_THROW(aggregate(Accumulator{}), NumericalError);
  Accumulator acc(2, 1);
  acc.add(0, 0, 1.0, 1.0);
  EXPECT_THROW(aggregate(acc), NumericalError);
}

TEST(Aggregate, InvariantToGlobalWeightScale) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  Accumulator a(4, 4), b(4, 4);
  for (int k = 0; k < 50; ++k) {
    const int r = static_cast<int>(rng() % 4), c = static_cast<int>(rng() % 4);
    const double v = u(rng), w = u(rng);
    a.add(r, c, v, w);
    b.add(r, c, v, 8.0 * w);
  }
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a.add(r, c, 1.0, 1.0), b.add(r, c, 1.0, 8.0);
  const Frame fa = aggregate(a), fb = aggregate(b);
  for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_NEAR(fa.values()[i], fb.values()[i], 1e-12);
}

TEST(Aggregate, OnePatchReproducesItExactly) {
  const auto window = kaiser_window(2.0);
  std::vector<double> patch(64);
  for (int i = 0; i < 64; ++i) patch[i] = 0.5 * i - 3.0;
  Accumulator acc(8, 8);
  acc.add_patch(0, 0, patch, 0.37, window);
  const Frame out = aggregate(acc);
  for (int i = 0; i < 64; ++i) EXPECT_NEAR(out.values()[i], patch[i], 1e-12);
}

TEST(FilterGroupHard, WeightFromRetainedCount) {
  std::vector<double> g(2 * 64, 0.0);
  g[0] = 100.0;  // one strong pixel
  const auto out = filter_group_hard(g, 1.0, 2.7);
  EXPECT_GT(out.retained, 0u);
  EXPECT_DOUBLE_EQ(out.weight, 1.0 / static_cast<double>(out.retained));
  // All-zero group keeps nothing; weight uses max(n, 1).
  const auto zero = filter_group_hard(std::vector<double>(64, 0.0), 2.0, 2.7);
  EXPECT_EQ(zero.retained, 0u);
  EXPECT_DOUBLE_EQ(zero.weight, 1.0 / 4.0);
}

// Pilot whose spectrum is zero except the group-mean slice: only the mean
// patch of the noisy group survives, repeated for every member.
TEST(FilterGroupWiener, MeanSliceOnlyPilotGivesMeanPatch) {
  const int k = 4;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-20, 20);
  std::vector<double> noisy(k * 64);
  for (double& v : noisy) v = u(rng);
  // Mean-slice pilot: every member equals a patch whose DCT coefficients are
  // all huge, so the Wiener factors on that slice are 1 to double precision.
  PatchValues spec;
  spec.fill(1e9);
  const PatchValues pilot_patch = inverse_2d(spec, Basis::kDct);
  std::vector<double> pilot;
  for (int i = 0; i < k; ++i) pilot.insert(pilot.end(), pilot_patch.begin(), pilot_patch.end());

  const auto out = filter_group_wiener(noisy, pilot, 1.0, Basis::kDct);
  for (int e = 0; e < 64; ++e) {
    double mean = 0.0;
    for (int i = 0; i < k; ++i) mean += noisy[i * 64 + e];
    mean /= k;
    for (int i = 0; i < k; ++i) EXPECT_NEAR(out.values[i * 64 + e], mean, 1e-6);
  }
  EXPECT_NEAR(out.weight, 1.0 / 64.0, 1e-9);
}

TEST(EngineConfig, Validation) {
  EngineConfig c;
  EXPECT_THROW(c.validate(), std::invalid_argument);  // sigma defaults to 0
  c.sigma = 1.0;
  EXPECT_NO_THROW(c.validate());
  c.lambda3d = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(HardStage, ConstantStackIsPreserved) {
  for (double sigma : {0.01, 1.0, 50.0}) {
    const FrameStack s(std::vector<Frame>(3, Frame(24, 20, 42.0)));
    EngineConfig c;
    c.sigma = sigma;
    const auto r = hard_stage(s, s, c);
    for (const auto& f : r.per_frame)
      for (double v : f.values()) EXPECT_NEAR(v, 42.0, 1e-10);
    for (double v : r.combined.values()) EXPECT_NEAR(v, 42.0, 1e-10);
  }
}

TEST(TwoStep, ConstantStackIsIdentity) {
  for (auto scope : {FrameScope::all(), FrameScope::single(1)}) {
    const FrameStack s(std::vector<Frame>(3, Frame(32, 24, 0.3)));
    EngineConfig c;
    c.sigma = 0.2;
    c.ref_scope = scope;
    const Frame out = run_two_step(s, c);
    for (double v : out.values()) EXPECT_NEAR(v, 0.3, 1e-8);
    const Frame w = wiener_stage(s, s, c);
    for (double v : w.values()) EXPECT_NEAR(v, 0.3, 1e-8);
  }
}

TEST(HardStage, ShapeMismatchAndEmpty) {
  EngineConfig c;
  c.sigma = 1.0;
  const FrameStack a(std::vector<Frame>(2, Frame(16, 16)));
  const FrameStack b(std::vector<Frame>(2, Frame(17, 16)));
  EXPECT_THROW(hard_stage(a, b, c), std::invalid_argument);
  EXPECT_THROW(hard_stage(FrameStack{}, FrameStack{}, c), std::invalid_argument);
  EXPECT_THROW(wiener_stage(a, b, c), std::invalid_argument);
}

TEST(HardStage, SingleReferenceFrameSharesCombinedEstimate) {
  std::vector<Frame> fs;
  for (int i = 0; i < 3; ++i) fs.push_back(oracle::random_frame(24, 24, 40 + i));
  const FrameStack s(fs);
  EngineConfig c;
  c.sigma = 30.0;
  c.ref_scope = FrameScope::single(1);
  const auto r = hard_stage(s, s, c);
  for (const auto& f : r.per_frame) EXPECT_EQ(f, r.combined);
}

// Step-by-step reimplementation of the single-frame filter on a 32x32 image.
TEST(TwoStep, SingleFrameMatchesStraightLineOracle) {
  const Frame clean = oracle::synthetic_scene(32, 32);
  for (std::uint64_t seed : {1u, 2u}) {
    const Frame noisy = add_gaussian(clean, 20.0, seed);
    oracle::BM3DParams prm;
    prm.sigma = 20.0;
    const auto [basic_ref, final_ref] = oracle::single_frame_bm3d(noisy, prm);

    const FrameStack s({noisy});
    const EngineConfig c = single_frame_config(20.0);
    const auto basic = hard_stage(s, s, c);
    const Frame fin = run_two_step(s, c);
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      EXPECT_NEAR(basic.combined.values()[i], basic_ref.values()[i], 1e-9);
      EXPECT_NEAR(fin.values()[i], final_ref.values()[i], 1e-9);
    }
  }
}

// L=1 with scope all equals L=1 with scope single(0).
TEST(TwoStep, ScopesCoincideForOneFrame) {
  const FrameStack s({add_gaussian(oracle::synthetic_scene(40, 32), 15.0, 5)});
  EngineConfig all;
  all.sigma = 15.0;
  const EngineConfig one = single_frame_config(15.0);
  EXPECT_EQ(run_two_step(s, all), run_two_step(s, one));
}

// Soft property: the Wiener step improves on the basic estimate in at least
// 90% of 20 seeds.
TEST(TwoStep, WienerImprovesOnBasicMostOfTheTime) {
  const Frame clean = oracle::synthetic_scene(48, 48);
  int better = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<Frame> fs;
    for (int l = 0; l < 2; ++l) fs.push_back(add_gaussian(clean, 30.0, seed * 7 + l));
    const FrameStack s(fs);
    EngineConfig c;
    c.sigma = 30.0;
    const auto basic = hard_stage(s, s, c);
    const Frame fin = run_two_step(s, c);
    if (psnr(fin, clean) >= psnr(basic.combined, clean)) ++better;
  }
  EXPECT_GE(better, 18);
}

TEST(TwoStep, Step2MatchModesDifferOnlyForMultipleReferenceFrames) {
  const Frame clean = oracle::synthetic_scene(32, 32);
  std::vector<Frame> fs;
  for (int l = 0; l < 3; ++l) fs.push_back(add_gaussian(clean, 25.0, 100 + l));
  const FrameStack s(fs);
  EngineConfig cross;
  cross.sigma = 25.0;
  EngineConfig per = cross;
  per.step2_match = Step2Match::kPerFrame;
  EXPECT_NE(run_two_step(s, cross), run_two_step(s, per));
  cross.ref_scope = per.ref_scope = FrameScope::single(0);
  EXPECT_EQ(run_two_step(s, cross), run_two_step(s, per));
}
