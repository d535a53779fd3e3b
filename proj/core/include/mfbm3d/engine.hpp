#pragma once

// Two-step collaborative filtering over a registered frame stack.
//
// Which reference patches are processed (ref_scope) and where their matches
// are searched (SearchConfig::frame_scope) select the multi-frame variant:
//
//   ref_scope single(l), search single(l)  classic single-frame filter on frame l
//   ref_scope single(l), search all        reference frame l, matches from every frame
//   ref_scope all,       search all        every frame is a reference frame
//
// Each filtered patch is scattered back to the position it was taken from.
// Because the frames are registered, the cross-frame aggregate sums those
// contributions into one image regardless of source frame.

#include <span>

#include "mfbm3d/image.hpp"
#include "mfbm3d/matching.hpp"
#include "mfbm3d/transforms.hpp"

namespace mfbm3d {

/// What the second step matches on when every frame is a reference frame.
enum class Step2Match {
  kCrossFrame,  ///< the cross-frame basic aggregate, shared by all frames
  kPerFrame,    ///< each frame's own basic estimate
};

struct EngineConfig {
  double sigma = 0.0;  ///< noise std of the data handed to the engine
  FrameScope ref_scope = FrameScope::all();
  SearchConfig step1{19, 3, 16, FrameScope::all()};
  SearchConfig step2{19, 3, 32, FrameScope::all()};
  double lambda3d = 2.7;
  double kaiser_beta = 2.0;
  Basis step1_basis = Basis::kBior15;
  Basis step2_basis = Basis::kDct;
  Step2Match step2_match = Step2Match::kCrossFrame;
  int jobs = 1;

  void validate() const;
};

/// Weighted sums behind one aggregated image: numerator sum(w * value) and
/// denominator sum(w) per pixel.
class Accumulator {
 public:
  Accumulator() = default;
  Accumulator(int width, int height);

  int width() const noexcept { return numerator_.width(); }
  int height() const noexcept { return numerator_.height(); }

  /// Adds an 8x8 patch at (row, col); pixel i gets weight weight * window[i].
  void add_patch(int row, int col, std::span<const double> values, double weight,
                 const PatchValues& window);

  /// Adds a single weighted value at one pixel.
  void add(int row, int col, double value, double weight);

  const Frame& numerator() const noexcept { return numerator_; }
  const Frame& denominator() const noexcept { return denominator_; }

 private:
  Frame numerator_;
  Frame denominator_;
};

/// Pixel-wise numerator / denominator. Throws NumericalError if any pixel
/// has a zero denominator (including an empty accumulator).
Frame aggregate(const Accumulator& acc);

struct HardStageResult {
  /// Estimate per input frame, used to match and pilot the second step.
  /// With a single reference frame only that frame is fully covered, so every
  /// entry holds the cross-frame aggregate instead.
  FrameStack per_frame;
  /// Cross-frame aggregate of every group from the reference scope.
  Frame combined;
};

/// Outcome of filtering one group.
struct FilteredGroup {
  std::vector<double> values;  ///< K*64 estimates, same layout as the input
  double weight = 0.0;         ///< aggregation weight of every patch in the group
  std::size_t retained = 0;    ///< nonzero coefficients after thresholding (hard step)
};

/// Hard-threshold filtering of one gathered group (bior15 -> WHT ->
/// threshold -> inverses). Weight is 1 / (sigma^2 * max(retained, 1)).
FilteredGroup filter_group_hard(std::span<const double> group, double sigma, double lambda3d,
                                Basis basis = Basis::kBior15);

/// Wiener filtering of the noisy group against the pilot group. Weight is
/// 1 / (sigma^2 * max(energy, eps)).
FilteredGroup filter_group_wiener(std::span<const double> noisy, std::span<const double> pilot,
                                  double sigma, Basis basis = Basis::kDct);

/// First step. Groups are matched on `match_source` and filled from `noisy`.
HardStageResult hard_stage(const FrameStack& noisy, const FrameStack& match_source,
                           const EngineConfig& cfg);

/// Second step. Groups are matched on `basic`, piloted by `basic` and filled
/// from `noisy`; returns the cross-frame aggregate.
Frame wiener_stage(const FrameStack& noisy, const FrameStack& basic, const EngineConfig& cfg);

/// Second step with separate sources for matching and for the pilot group.
Frame wiener_stage(const FrameStack& noisy, const FrameStack& match_source,
                   const FrameStack& pilot_source, const EngineConfig& cfg);

/// hard_stage followed by wiener_stage. The pilot is always the per-frame
/// basic estimate; matching follows cfg.step2_match.
Frame run_two_step(const FrameStack& noisy, const FrameStack& step1_match_source,
                   const EngineConfig& cfg);
inline Frame run_two_step(const FrameStack& noisy, const EngineConfig& cfg) {
  return run_two_step(noisy, noisy, cfg);
}

}  // namespace mfbm3d
