#include "mfbm3d/extensions.hpp"

#include <stdexcept>

#include "mfbm3d/vst.hpp"

namespace mfbm3d {

const char* to_string(MethodKind kind) noexcept {
  switch (kind) {
    case MethodKind::kBm3d1:
      return "bm3d1";
    case MethodKind::kBm3d2:
      return "bm3d2";
    case MethodKind::kBm3d3:
      return "bm3d3";
    case MethodKind::kBm3d4:
      return "bm3d4";
    case MethodKind::kBm3d4Sigma:
      return "bm3d4_sigma";
  }
  return "?";
}

std::string Method::name() const { return to_string(kind); }

MethodKind method_kind_from_string(const std::string& name) {
  for (auto k : {MethodKind::kBm3d1, MethodKind::kBm3d2, MethodKind::kBm3d3, MethodKind::kBm3d4,
                 MethodKind::kBm3d4Sigma}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected bm3d1, bm3d2, bm3d3, bm3d4 or bm3d4_sigma)");
}

Frame average_frames(const FrameStack& stack) {
  if (stack.empty()) throw std::invalid_argument("average_frames: empty stack");
  Frame out(stack.width(), stack.height(), 0.0);
  auto dst = out.values();
  for (const auto& f : stack) {
    auto src = f.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  const double n = static_cast<double>(stack.size());
  for (double& v : dst) v /= n;
  return out;
}

namespace {

// Engine run on `data` (already in the domain the engine works in).
Frame run_engine(const FrameStack& data, const FrameStack& step1_match, FrameScope ref_scope,
                 FrameScope search_scope, double sigma, const DenoiseOptions& options) {
  EngineConfig cfg = options.engine;
  cfg.sigma = sigma;
  cfg.ref_scope = ref_scope;
  cfg.step1.frame_scope = search_scope;
  cfg.step2.frame_scope = search_scope;
  return run_two_step(data, step1_match, cfg);
}

// Anscombe -> rescale -> engine -> rescale back -> unbiased inverse. When
// `raw_match` is given it replaces the stabilised data for step-1 matching.
Frame run_pipeline(const FrameStack& stack, FrameScope ref_scope, FrameScope search_scope,
                   const DenoiseOptions& options, const FrameStack* raw_match = nullptr) {
  if (!options.stabilize) {
    return run_engine(stack, raw_match ? *raw_match : stack, ref_scope, search_scope,
                      options.gaussian_sigma, options);
  }
  VstState state;
  const FrameStack unit = rescale_to_unit(anscombe_forward(stack), state);
  const Frame est = run_engine(unit, raw_match ? *raw_match : unit, ref_scope, search_scope,
                               state.sigma_rescaled, options);
  return exact_unbiased_inverse_cf(rescale_back(est, state));
}

}  // namespace

Frame denoise_single(const Frame& frame, const DenoiseOptions& options) {
  return run_pipeline(FrameStack({frame}), FrameScope::single(0), FrameScope::single(0), options);
}

Frame denoise(const FrameStack& stack, const Method& method, const DenoiseOptions& options) {
  if (stack.empty()) throw std::invalid_argument("denoise: empty stack");
  switch (method.kind) {
    case MethodKind::kBm3d1:
      return denoise_single(average_frames(stack), options);
    case MethodKind::kBm3d2: {
      std::vector<Frame> estimates;
      estimates.reserve(stack.size());
      for (const auto& f : stack) estimates.push_back(denoise_single(f, options));
      return average_frames(FrameStack(std::move(estimates)));
    }
    case MethodKind::kBm3d3:
      if (method.ref_frame < 0 || method.ref_frame >= static_cast<int>(stack.size()))
        throw std::invalid_argument("bm3d3: reference frame " + std::to_string(method.ref_frame) +
                                    " outside [0, " + std::to_string(stack.size()) + ")");
      return run_pipeline(stack, FrameScope::single(method.ref_frame), FrameScope::all(), options);
    case MethodKind::kBm3d4:
      return run_pipeline(stack, FrameScope::all(), FrameScope::all(), options);
    case MethodKind::kBm3d4Sigma: {
      const FrameStack prefiltered =
          lowpass(stack, LowPassSpec{method.sigma_lp, options.lowpass_shape});
      return run_pipeline(stack, FrameScope::all(), FrameScope::all(), options, &prefiltered);
    }
  }
  throw std::invalid_argument("denoise: unknown method");
}

}  // namespace mfbm3d
