#include "mfbm3d/vst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfbm3d {

double anscombe_floor() noexcept { return 2.0 * std::sqrt(3.0 / 8.0); }

double anscombe(double z) {
  if (z < 0.0) throw std::invalid_argument("anscombe: negative input");
  return 2.0 * std::sqrt(z + 3.0 / 8.0);
}

double anscombe_algebraic_inverse(double d) { return 0.25 * d * d - 3.0 / 8.0; }

double exact_unbiased_inverse_cf(double d) noexcept {
  if (!(d > anscombe_floor())) return 0.0;
  const double s = std::sqrt(1.5);
  const double inv = 1.0 / d;
  const double inv2 = inv * inv;
  const double v = 0.25 * d * d + 0.25 * s * inv - 11.0 / 8.0 * inv2 + 5.0 / 8.0 * s * inv2 * inv - 0.125;
  return std::max(v, 0.0);
}

Frame anscombe_forward(const Frame& f) {
  Frame out(f.width(), f.height());
  auto src = f.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = anscombe(src[i]);
  return out;
}

FrameStack anscombe_forward(const FrameStack& s) {
  std::vector<Frame> frames;
  frames.reserve(s.size());
  for (const auto& f : s) frames.push_back(anscombe_forward(f));
  return FrameStack(std::move(frames));
}

Frame exact_unbiased_inverse_cf(const Frame& d) {
  Frame out(d.width(), d.height());
  auto src = d.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = exact_unbiased_inverse_cf(src[i]);
  return out;
}

FrameStack rescale_to_unit(const FrameStack& stack, VstState& state) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& f : stack) {
    const auto [mn, mx] = std::minmax_element(f.values().begin(), f.values().end());
    if (mn == f.values().end()) continue;
    lo = std::min(lo, *mn);
    hi = std::max(hi, *mx);
  }
  if (!(hi > lo)) throw std::invalid_argument("rescale_to_unit: stack is constant");
  state.scale_min = lo;
  state.scale_max = hi;
  state.sigma_rescaled = 1.0 / (hi - lo);
  const double range = hi - lo;
  std::vector<Frame> frames;
  frames.reserve(stack.size());
  for (const auto& f : stack) {
    Frame g(f.width(), f.height());
    auto src = f.values();
    auto dst = g.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = (src[i] - lo) / range;
    frames.push_back(std::move(g));
  }
  return FrameStack(std::move(frames));
}

Frame rescale_back(const Frame& f, const VstState& state) {
  Frame out(f.width(), f.height());
  const double range = state.scale_max - state.scale_min;
  auto src = f.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * range + state.scale_min;
  return out;
}

}  // namespace mfbm3d
