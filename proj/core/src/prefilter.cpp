#include "mfbm3d/prefilter.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace mfbm3d {

namespace {

// Plan creation and destruction in FFTW are not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

int centred(int k, int n) { return k <= n / 2 ? k : k - n; }

}  // namespace

double lowpass_response(double ky, double kx, int height, int width, const LowPassSpec& spec) {
  const double fy = ky * 256.0 / height;
  const double fx = kx * 256.0 / width;
  const double half = spec.sigma_lp / 2.0;
  const double mag = std::hypot(fx, fy);
  if (mag < half) return 1.0;
  const double denom = 2.0 * half * half;
  if (spec.shape == LowPassShape::kRadial) {
    const double d = mag - half;
    return std::exp(-d * d / denom);
  }
  const double dx = fx - half;
  const double dy = fy - half;
  return std::exp(-(dx * dx + dy * dy) / denom);
}

Frame lowpass(const Frame& f, const LowPassSpec& spec) {
  if (!(spec.sigma_lp > 0.0)) throw std::invalid_argument("lowpass: sigma_lp must be > 0");
  const int h = f.height();
  const int w = f.width();
  const std::size_t n = f.size();
  std::unique_ptr<fftw_complex, FftwFree> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
  fftw_plan fwd;
  fftw_plan inv;
  {
    std::lock_guard lock(planner_mutex());
    fwd = fftw_plan_dft_2d(h, w, buf.get(), buf.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    inv = fftw_plan_dft_2d(h, w, buf.get(), buf.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  auto src = f.values();
  for (std::size_t i = 0; i < n; ++i) {
    buf.get()[i][0] = src[i];
    buf.get()[i][1] = 0.0;
  }
  fftw_execute(fwd);
  for (int r = 0; r < h; ++r) {
    const int ky = centred(r, h);
    for (int c = 0; c < w; ++c) {
      const double g = lowpass_response(ky, centred(c, w), h, w, spec);
      fftw_complex& z = buf.get()[static_cast<std::size_t>(r) * w + c];
      z[0] *= g;
      z[1] *= g;
    }
  }
  fftw_execute(inv);
  Frame out(w, h);
  auto dst = out.values();
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) dst[i] = buf.get()[i][0] * scale;
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  return out;
}

FrameStack lowpass(const FrameStack& s, const LowPassSpec& spec) {
  std::vector<Frame> frames;
  frames.reserve(s.size());
  for (const auto& f : s) frames.push_back(lowpass(f, spec));
  return FrameStack(std::move(frames));
}

}  // namespace mfbm3d
