#pragma once

// Block matching across one frame or a whole registered stack.

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "mfbm3d/image.hpp"
#include "mfbm3d/transforms.hpp"

namespace mfbm3d {

/// Top-left corner of an 8x8 patch inside frame `frame` of a stack.
struct PatchOrigin {
  int frame = 0;
  int row = 0;
  int col = 0;

  friend auto operator<=>(const PatchOrigin&, const PatchOrigin&) = default;
};

/// Either one frame of the stack or all of them.
class FrameScope {
 public:
  static constexpr FrameScope all() noexcept { return FrameScope(-1); }
  static constexpr FrameScope single(int frame) noexcept { return FrameScope(frame); }

  constexpr bool is_all() const noexcept { return frame_ < 0; }
  /// Only meaningful when !is_all().
  constexpr int frame() const noexcept { return frame_; }

  constexpr bool contains(int frame) const noexcept { return is_all() || frame == frame_; }

  /// Frame indices covered by this scope in a stack of `count` frames.
  std::vector<int> frames(std::size_t count) const;

  friend constexpr bool operator==(FrameScope, FrameScope) = default;

 private:
  explicit constexpr FrameScope(int frame) noexcept : frame_(frame) {}
  int frame_;
};

struct SearchConfig {
  int search_radius = 19;  ///< window is (2r+1) x (2r+1) patch positions
  int stride = 3;          ///< reference grid spacing
  int max_group = 16;
  FrameScope frame_scope = FrameScope::all();

  /// Throws std::invalid_argument on stride < 1, max_group < 1 or a negative radius.
  void validate() const;
};

/// A matched group: origins[0] is the reference, distances are per-pixel
/// mean squared differences to it.
struct MatchedGroup {
  std::vector<PatchOrigin> origins;
  std::vector<double> distances;

  std::size_t size() const noexcept { return origins.size(); }
};

/// Mean squared difference of two equally sized patches.
double patch_distance(std::span<const double> a, std::span<const double> b);

/// Distance between two 8x8 patches located in frames.
double patch_distance(const Frame& a, int a_row, int a_col, const Frame& b, int b_row, int b_col);

/// Reference origins on a stride-spaced grid per frame, always including
/// the last valid row and column. Ordered by (frame, row, col).
std::vector<PatchOrigin> enumerate_references(const FrameStack& stack, int stride,
                                              FrameScope ref_scope);

/// Grid positions along one axis of length `extent`.
std::vector<int> reference_positions(int extent, int stride);

/// Finds the closest patches to `ref` within the search window of every frame
/// in cfg.frame_scope. No distance threshold is applied. The reference is
/// always member 0, the rest follow in (distance, frame, row, col) order and
/// the count is truncated to a power of two not above cfg.max_group.
MatchedGroup find_similar(const PatchOrigin& ref, const FrameStack& stack, const SearchConfig& cfg);

/// Matches every reference of one grid row at once. This is the code path
/// the engine uses; for each column it returns exactly what find_similar
/// returns for that reference.
std::vector<MatchedGroup> find_similar_row(int ref_frame, int ref_row, std::span<const int> ref_cols,
                                           const FrameStack& stack, const SearchConfig& cfg);

/// Copies the pixels of every origin into a K*64 buffer, patch after patch.
void gather_group(const FrameStack& stack, std::span<const PatchOrigin> origins,
                  std::span<double> out);

}  // namespace mfbm3d
