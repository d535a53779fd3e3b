#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "mfbm3d/engine.hpp"
#include "mfbm3d/prefilter.hpp"
#include "oracles.hpp"

using namespace mfbm3d;

namespace {

// Transfer function written from the formula, for a 256-scaled grid.
double radial_h(double ky, double kx, int h, int w, double s) {
  const double fy = ky * 256.0 / h, fx = kx * 256.0 / w;
  const double r = std::hypot(fy, fx);
  const double half = s / 2.0;
  if (r < half) return 1.0;
  return std::exp(-(r - half) * (r - half) / (2.0 * half * half));
}

int centred(int k, int n) { return k <= (n - 1) / 2 ? k : k - n; }

// Separable naive DFT (no FFT library involved).
std::vector<std::complex<double>> dft2(const Frame& f) {
  const int h = f.height(), w = f.width();
  std::vector<std::complex<double>> rows(static_cast<std::size_t>(h) * w), out(rows.size());
  for (int r = 0; r < h; ++r)
    for (int k = 0; k < w; ++k) {
      std::complex<double> acc = 0.0;
      for (int c = 0; c < w; ++c) acc += f(r, c) * std::polar(1.0, -2.0 * std::numbers::pi * k * c / w);
      rows[static_cast<std::size_t>(r) * w + k] = acc;
    }
  for (int k = 0; k < w; ++k)
    for (int q = 0; q < h; ++q) {
      std::complex<double> acc = 0.0;
      for (int r = 0; r < h; ++r)
        acc += rows[static_cast<std::size_t>(r) * w + k] * std::polar(1.0, -2.0 * std::numbers::pi * q * r / h);
      out[static_cast<std::size_t>(q) * w + k] = acc;
    }
  return out;
}

double energy(const Frame& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return s;
}

}  // namespace

TEST(LowPass, ConstantFrameUnchanged) {
  const Frame f(64, 48, 3.5);
  const Frame g = lowpass(f, LowPassSpec{95.0});
  for (double v : g.values()) EXPECT_NEAR(v, 3.5, 1e-10);
}

TEST(LowPass, WidePassbandIsIdentity) {
  const Frame f = oracle::random_frame(64, 64, 1);
  // Largest magnitude on the 256-scaled grid is 128*sqrt(2) < 400/2.
  const Frame g = lowpass(f, LowPassSpec{400.0});
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(g.values()[i], f.values()[i], 1e-10);
}

TEST(LowPass, ResponseMatchesFormula) {
  for (int n : {64, 256, 512})
    for (double s : {40.0, 95.0, 195.0})
      for (int ky = -n / 2; ky < n / 2; ky += 7)
        for (int kx = -n / 2; kx < n / 2; kx += 5)
          EXPECT_NEAR(lowpass_response(ky, kx, n, n, LowPassSpec{s}), radial_h(ky, kx, n, n, s), 1e-14);
}

TEST(LowPass, PerComponentShape) {
  const LowPassSpec spec{100.0, LowPassShape::kPerComponent};
  EXPECT_EQ(lowpass_response(0, 0, 256, 256, spec), 1.0);
  EXPECT_EQ(lowpass_response(30, -20, 256, 256, spec), 1.0);
  // Outside the passband: signed per-component offsets.
  const double ky = 60, kx = -10;
  const double expected = std::exp(-((ky - 50) * (ky - 50) + (kx - 50) * (kx - 50)) / (2.0 * 50 * 50));
  EXPECT_NEAR(lowpass_response(ky, kx, 256, 256, spec), expected, 1e-14);
}

TEST(LowPass, ParsevalAgainstNaiveDft) {
  const Frame f = oracle::random_frame(32, 32, 2, -1.0, 1.0);
  const double s = 20.0;  // on the 256 grid: passband radius 10, i.e. 1.25 bins here
  const Frame g = lowpass(f, LowPassSpec{s});
  const auto spec = dft2(f);
  double expected = 0.0;
  for (int q = 0; q < 32; ++q)
    for (int k = 0; k < 32; ++k) {
      const double h = radial_h(centred(q, 32), centred(k, 32), 32, 32, s);
      expected += h * h * std::norm(spec[static_cast<std::size_t>(q) * 32 + k]);
    }
  expected /= 32.0 * 32.0;
  EXPECT_NEAR(energy(g), expected, 1e-9 * expected);
}

TEST(LowPass, WhiteNoiseVarianceDrops) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  Frame f(256, 256);
  for (double& v : f.values()) v = n(rng);
  const Frame g = lowpass(f, LowPassSpec{95.0});
  double mean_h2 = 0.0;
  for (int q = 0; q < 256; ++q)
    for (int k = 0; k < 256; ++k) {
      const double h = radial_h(centred(q, 256), centred(k, 256), 256, 256, 95.0);
      mean_h2 += h * h;
    }
  mean_h2 /= 256.0 * 256.0;
  const double ratio = energy(g) / energy(f);
  EXPECT_LT(ratio, 1.0);
  EXPECT_NEAR(ratio, mean_h2, 0.02);
}

TEST(LowPass, LinearAndNonExpansive) {
  const Frame a = oracle::random_frame(40, 36, 4), b = oracle::random_frame(40, 36, 5);
  Frame mix(40, 36);
  for (std::size_t i = 0; i < mix.size(); ++i) mix.values()[i] = 2.5 * a.values()[i] - 0.75 * b.values()[i];
  const LowPassSpec spec{60.0};
  const Frame la = lowpass(a, spec), lb = lowpass(b, spec), lm = lowpass(mix, spec);
  for (std::size_t i = 0; i < mix.size(); ++i)
    EXPECT_NEAR(lm.values()[i], 2.5 * la.values()[i] - 0.75 * lb.values()[i], 1e-9);
  EXPECT_LE(energy(la), energy(a));
  EXPECT_LE(energy(lb), energy(b));
}

TEST(LowPass, RejectsNonPositiveSigma) {
  EXPECT_THROW(lowpass(Frame(16, 16), LowPassSpec{0.0}), std::invalid_argument);
  EXPECT_THROW(lowpass(Frame(16, 16), LowPassSpec{-5.0}), std::invalid_argument);
}

TEST(LowPass, StackFiltersEachFrame) {
  const FrameStack s({oracle::random_frame(32, 32, 6), oracle::random_frame(32, 32, 7)});
  const FrameStack out = lowpass(s, LowPassSpec{80.0});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[1], lowpass(s[1], LowPassSpec{80.0}));
}

// The match source only decides which patches are grouped. Scaling it by an
// exact factor keeps every ranking, so the output must not change at all,
// while the values themselves always come from the noisy stack.
TEST(LowPass, MatchSourceOnlyAffectsGrouping) {
  std::vector<Frame> fs;
  for (int i = 0; i < 3; ++i) fs.push_back(oracle::random_frame(32, 32, 50 + i));
  const FrameStack noisy(fs);
  const FrameStack match = lowpass(noisy, LowPassSpec{90.0});
  FrameStack scaled = match;
  for (auto& f : scaled)
    for (double& v : f.values()) v *= -2.0;
  EngineConfig c;
  c.sigma = 40.0;
  EXPECT_EQ(run_two_step(noisy, match, c), run_two_step(noisy, scaled, c));
  const auto basic = hard_stage(noisy, match, c);
  EXPECT_EQ(basic.combined, hard_stage(noisy, scaled, c).combined);
}
