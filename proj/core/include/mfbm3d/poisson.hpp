#pragma once

#include <cstdint>
#include <random>

namespace mfbm3d {

/// Reproducible Poisson sampler on top of mt19937_64.
///
/// Means below 10 use sequential inversion of the CDF; larger means use
/// Hormann's transformed rejection (PTRS). Uniforms are built from the top
/// 53 bits of each engine output, so the stream is identical on every
/// platform for a given seed.
class PoissonSampler {
 public:
  explicit PoissonSampler(std::uint64_t seed) : engine_(seed) {}
  PoissonSampler(std::uint64_t seed, std::uint64_t stream);

  std::int64_t operator()(double mean);

  /// Uniform in [0, 1).
  double uniform();

 private:
  std::int64_t inversion(double mean);
  std::int64_t transformed_rejection(double mean);

  std::mt19937_64 engine_;
};

}  // namespace mfbm3d
