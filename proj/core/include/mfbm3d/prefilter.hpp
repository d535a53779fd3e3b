#pragma once

// Fourier-domain low-pass filter used only to make first-step block
// matching robust against heavy noise.

#include "mfbm3d/image.hpp"

namespace mfbm3d {

enum class LowPassShape {
  /// H = 1 inside |k| < s/2, exp(-(|k| - s/2)^2 / (2 (s/2)^2)) outside.
  kRadial,
  /// Same passband, but the roll-off offsets each signed component:
  /// exp(-((kx - s/2)^2 + (ky - s/2)^2) / (2 (s/2)^2)).
  kPerComponent,
};

struct LowPassSpec {
  /// Filter shape parameter in frequency-index units of a 256x256 grid.
  /// Other sizes are scaled per axis, so s keeps the same meaning relative
  /// to the Nyquist frequency.
  double sigma_lp = 95.0;
  LowPassShape shape = LowPassShape::kRadial;
};

/// Transfer function at a centred frequency index (ky, kx) of a
/// height x width grid.
double lowpass_response(double ky, double kx, int height, int width, const LowPassSpec& spec);

/// FFT -> multiply by the transfer function -> inverse FFT, keeping the real
/// part. Throws std::invalid_argument if sigma_lp <= 0.
Frame lowpass(const Frame& f, const LowPassSpec& spec);
FrameStack lowpass(const FrameStack& s, const LowPassSpec& spec);

}  // namespace mfbm3d
