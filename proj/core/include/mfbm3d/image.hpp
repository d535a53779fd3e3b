#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mfbm3d {

/// Smallest accepted frame edge: one 8x8 patch plus search margin.
inline constexpr int kMinFrameSize = 16;

/// Single-channel real-valued raster, row-major.
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, double fill = 0.0);
  Frame(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int row, int col) noexcept {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  double operator()(int row, int col) const noexcept {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }

  const double* row_ptr(int row) const noexcept {
    return data_.data() + static_cast<std::size_t>(row) * width_;
  }
  double* row_ptr(int row) noexcept {
    return data_.data() + static_cast<std::size_t>(row) * width_;
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const Frame& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  /// Throws std::invalid_argument unless the frame is at least
  /// kMinFrameSize on both axes and every value is finite.
  void validate() const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Ordered set of registered frames with identical dimensions.
class FrameStack {
 public:
  FrameStack() = default;
  explicit FrameStack(std::vector<Frame> frames);

  std::size_t size() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }
  int width() const noexcept { return frames_.empty() ? 0 : frames_.front().width(); }
  int height() const noexcept { return frames_.empty() ? 0 : frames_.front().height(); }

  const Frame& operator[](std::size_t i) const noexcept { return frames_[i]; }
  Frame& operator[](std::size_t i) noexcept { return frames_[i]; }

  auto begin() const noexcept { return frames_.begin(); }
  auto end() const noexcept { return frames_.end(); }
  auto begin() noexcept { return frames_.begin(); }
  auto end() noexcept { return frames_.end(); }

  const std::vector<Frame>& frames() const noexcept { return frames_; }

  bool same_shape(const FrameStack& other) const noexcept;

  friend bool operator==(const FrameStack&, const FrameStack&) = default;

 private:
  std::vector<Frame> frames_;
};

enum class ImageFormat { kPgm, kPng };

/// Picks the format from the file extension (.pgm or .png, case-insensitive).
ImageFormat format_from_path(const std::filesystem::path& path);

Frame read_image(const std::filesystem::path& path, ImageFormat format);
Frame read_image(const std::filesystem::path& path);

/// Rounds to nearest and clamps to [0, 2^bit_depth - 1] before encoding.
/// bit_depth must be 8 or 16.
void write_image(const Frame& frame, const std::filesystem::path& path, ImageFormat format,
                 int bit_depth = 8);
void write_image(const Frame& frame, const std::filesystem::path& path, int bit_depth = 8);

/// Loads every .pgm/.png in a directory, or the listed files, sorted
/// lexicographically by path.
FrameStack load_stack(const std::filesystem::path& directory);
FrameStack load_stack(std::vector<std::filesystem::path> files);

}  // namespace mfbm3d
