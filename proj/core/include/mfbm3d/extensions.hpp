#pragma once

// The multi-frame denoisers built on the two-step engine:
//
//   bm3d1        average the frames, then denoise the mean image
//   bm3d2        denoise every frame on its own, then average
//   bm3d3        one reference frame, matches searched in all frames
//   bm3d4        every frame is a reference frame, matches from all frames
//   bm3d4_sigma  bm3d4 with first-step matching on low-pass filtered counts

#include <optional>
#include <string>

#include "mfbm3d/engine.hpp"
#include "mfbm3d/image.hpp"
#include "mfbm3d/prefilter.hpp"

namespace mfbm3d {

enum class MethodKind { kBm3d1, kBm3d2, kBm3d3, kBm3d4, kBm3d4Sigma };

struct Method {
  MethodKind kind = MethodKind::kBm3d4;
  int ref_frame = 0;       ///< bm3d3 only
  double sigma_lp = 95.0;  ///< bm3d4_sigma only

  static Method bm3d1() { return {MethodKind::kBm3d1}; }
  static Method bm3d2() { return {MethodKind::kBm3d2}; }
  static Method bm3d3(int ref_frame) { return {MethodKind::kBm3d3, ref_frame}; }
  static Method bm3d4() { return {MethodKind::kBm3d4}; }
  static Method bm3d4_sigma(double sigma_lp) { return {MethodKind::kBm3d4Sigma, 0, sigma_lp}; }

  /// "bm3d1", ..., "bm3d4_sigma"
  std::string name() const;
};

/// Parses a method name; bm3d3 takes ref_frame, bm3d4_sigma takes sigma_lp.
MethodKind method_kind_from_string(const std::string& name);
const char* to_string(MethodKind kind) noexcept;

struct DenoiseOptions {
  /// Engine template; sigma and scopes are filled in per method.
  EngineConfig engine;
  LowPassShape lowpass_shape = LowPassShape::kRadial;
  /// Wrap the engine in the Anscombe pipeline (Poisson data). When false the
  /// input is treated as Gaussian with std `gaussian_sigma`.
  bool stabilize = true;
  double gaussian_sigma = 0.0;
};

/// Pixel-wise arithmetic mean of all frames.
Frame average_frames(const FrameStack& stack);

/// Single-frame two-step filter on frame 0 of a one-frame stack, wrapped in
/// the VST pipeline when options.stabilize is set.
Frame denoise_single(const Frame& frame, const DenoiseOptions& options);

/// Runs one multi-frame method. For Poisson input the result is in the
/// count domain of the input.
Frame denoise(const FrameStack& stack, const Method& method, const DenoiseOptions& options);

}  // namespace mfbm3d
