#pragma once

// Anscombe variance stabilisation for Poisson data, the affine map to [0, 1]
// and the closed-form approximation of the exact unbiased inverse.
//
// Pipeline order: anscombe_forward -> rescale_to_unit -> denoise with
// sigma_rescaled -> rescale_back -> exact_unbiased_inverse_cf.

#include "mfbm3d/image.hpp"

namespace mfbm3d {

/// 2*sqrt(3/8): the stabilised value of a zero count.
double anscombe_floor() noexcept;

double anscombe(double z);
double anscombe_algebraic_inverse(double d);

/// Closed-form exact unbiased inverse. Inputs below anscombe_floor() map to 0.
double exact_unbiased_inverse_cf(double d) noexcept;

/// Element-wise 2*sqrt(z + 3/8). Throws std::invalid_argument on negative input.
Frame anscombe_forward(const Frame& f);
FrameStack anscombe_forward(const FrameStack& s);

Frame exact_unbiased_inverse_cf(const Frame& d);

struct VstState {
  double scale_min = 0.0;
  double scale_max = 1.0;
  /// Unit stabilised noise expressed in the rescaled range: 1 / (max - min).
  double sigma_rescaled = 1.0;
};

/// Maps the whole stack to [0, 1] with one min/max. Throws
/// std::invalid_argument if the stack is constant.
FrameStack rescale_to_unit(const FrameStack& stack, VstState& state);
Frame rescale_back(const Frame& f, const VstState& state);

}  // namespace mfbm3d
