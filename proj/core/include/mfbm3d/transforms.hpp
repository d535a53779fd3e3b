#pragma once

// Separable transforms and shrinkage operators for 3D patch groups.
//
// A group is stored as K consecutive 8x8 patches (row-major), so the
// coefficient for patch k, row r, column c lives at k*64 + r*8 + c. The 2D
// transform acts on each 64-value block, the 1D Walsh-Hadamard transform
// acts along k for every (r, c).

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mfbm3d {

inline constexpr int kPatchSize = 8;
inline constexpr int kPatchArea = kPatchSize * kPatchSize;

using PatchValues = std::array<double, kPatchArea>;

enum class Basis {
  kBior15,  ///< 3-level bi-orthogonal spline 1.5 wavelet, periodic extension
  kDct,     ///< orthonormal type-II DCT
};

const char* to_string(Basis basis) noexcept;
Basis basis_from_string(const std::string& name);

bool is_power_of_two(std::size_t n) noexcept;

/// Largest power of two <= n (n >= 1).
std::size_t floor_power_of_two(std::size_t n) noexcept;

/// Orthonormal Walsh-Hadamard transform (natural order) in place. The
/// transform is its own inverse. Throws std::invalid_argument unless the
/// length is a power of two.
void wht_1d(std::span<double> v);

/// Copy-returning convenience overload.
std::vector<double> wht_1d(std::vector<double> v);

/// Transforms one 8x8 patch in place.
void forward_2d(std::span<double, kPatchArea> patch, Basis basis);
void inverse_2d(std::span<double, kPatchArea> coeffs, Basis basis);

PatchValues forward_2d(const PatchValues& patch, Basis basis);
PatchValues inverse_2d(const PatchValues& coeffs, Basis basis);

/// Applies the WHT along the group axis for every in-patch coefficient.
/// group.size() must be K * 64 with K a power of two.
void wht_group_axis(std::span<double> group);

/// Full 3D analysis: 2D transform of every patch, then WHT across patches.
void forward_3d(std::span<double> group, Basis basis);
void inverse_3d(std::span<double> group, Basis basis);

/// Zeroes every coefficient with |value| < tau. When keep_dc is set, index 0
/// (the group DC after forward_3d) is left untouched. Returns the number of
/// nonzero coefficients that remain.
std::size_t hard_threshold(std::span<double> spectrum, double tau, bool keep_dc = true);

/// Empirical Wiener shrinkage. Each noisy coefficient is multiplied by
/// pilot^2 / (pilot^2 + sigma^2); with keep_dc set, index 0 is multiplied by
/// one. Returns the sum of squared shrinkage factors.
double wiener_shrink(std::span<double> noisy, std::span<const double> pilot, double sigma,
                     bool keep_dc = false);

/// Separable Kaiser window over an 8x8 patch; beta = 0 gives all ones.
PatchValues kaiser_window(double beta);

}  // namespace mfbm3d
