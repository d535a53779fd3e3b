#include "mfbm3d/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mfbm3d/errors.hpp"

namespace mfbm3d {

namespace fs = std::filesystem;

Frame::Frame(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) throw std::invalid_argument("Frame: negative dimensions");
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

Frame::Frame(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) throw std::invalid_argument("Frame: negative dimensions");
  if (data_.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("Frame: data size does not match dimensions");
}

void Frame::validate() const {
  if (width_ < kMinFrameSize || height_ < kMinFrameSize) {
    throw std::invalid_argument("frame must be at least " + std::to_string(kMinFrameSize) + "x" +
                                std::to_string(kMinFrameSize) + ", got " +
                                std::to_string(width_) + "x" + std::to_string(height_));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw std::invalid_argument("frame contains non-finite values");
  }
}

FrameStack::FrameStack(std::vector<Frame> frames) : frames_(std::move(frames)) {
  for (const auto& f : frames_) {
    if (!f.same_shape(frames_.front()))
      throw std::invalid_argument("FrameStack: frames differ in dimensions");
  }
}

bool FrameStack::same_shape(const FrameStack& other) const noexcept {
  return size() == other.size() && width() == other.width() && height() == other.height();
}

ImageFormat format_from_path(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".pgm") return ImageFormat::kPgm;
  if (ext == ".png") return ImageFormat::kPng;
  throw std::invalid_argument("unsupported image extension '" + ext + "' (expected .pgm or .png)");
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in, const fs::path& path) {
  std::string tok;
  while (in) {
    int c = in.get();
    if (c == EOF) break;
    if (c == '#') {
      std::string discard;
      std::getline(in, discard);
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw IoError("malformed PGM header in " + path.string());
  return tok;
}

int pgm_int(std::istream& in, const fs::path& path) {
  const std::string tok = pgm_token(in, path);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError("malformed PGM header in " + path.string() + ": '" + tok + "'");
  }
}

Frame read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = pgm_token(in, path);
  if (magic == "P6" || magic == "P3")
    throw IoError(path.string() + ": single-channel required (got PPM color image)");
  if (magic != "P5") throw IoError("malformed PGM header in " + path.string() + ": magic '" + magic + "'");
  const int width = pgm_int(in, path);
  const int height = pgm_int(in, path);
  const int maxval = pgm_int(in, path);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
    throw IoError("malformed PGM header in " + path.string());
  // pgm_token consumed exactly one whitespace byte after maxval.
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<double> data(n);
  if (maxval < 256) {
    std::vector<unsigned char> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw IoError("truncated PGM data in " + path.string());
    std::copy(raw.begin(), raw.end(), data.begin());
  } else {
    std::vector<unsigned char> raw(2 * n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(2 * n));
    if (static_cast<std::size_t>(in.gcount()) != 2 * n)
      throw IoError("truncated PGM data in " + path.string());
    for (std::size_t i = 0; i < n; ++i) data[i] = (raw[2 * i] << 8) | raw[2 * i + 1];
  }
  return Frame(width, height, std::move(data));
}

void write_pgm(const Frame& frame, const fs::path& path, int bit_depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const int maxval = bit_depth == 8 ? 255 : 65535;
  out << "P5\n" << frame.width() << ' ' << frame.height() << '\n' << maxval << '\n';
  std::vector<unsigned char> raw;
  raw.reserve(frame.size() * (bit_depth / 8));
  for (double v : frame.values()) {
    const auto q = static_cast<unsigned>(std::clamp(std::round(v), 0.0, double(maxval)));
    if (bit_depth == 16) raw.push_back(static_cast<unsigned char>(q >> 8));
    raw.push_back(static_cast<unsigned char>(q & 0xff));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Frame read_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw IoError("malformed PNG in " + path.string() + ": " + image.message);
  if (image.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA)) {
    png_image_free(&image);
    throw IoError(path.string() + ": single-channel required");
  }
  const bool wide = (image.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  image.format = wide ? PNG_FORMAT_LINEAR_Y : PNG_FORMAT_GRAY;
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  std::vector<double> data(static_cast<std::size_t>(width) * height);
  if (wide) {
    std::vector<std::uint16_t> buf(data.size());
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr))
      throw IoError("corrupt PNG data in " + path.string() + ": " + image.message);
    std::copy(buf.begin(), buf.end(), data.begin());
  } else {
    std::vector<std::uint8_t> buf(data.size());
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr))
      throw IoError("corrupt PNG data in " + path.string() + ": " + image.message);
    std::copy(buf.begin(), buf.end(), data.begin());
  }
  return Frame(width, height, std::move(data));
}

void write_png(const Frame& frame, const fs::path& path, int bit_depth) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(frame.width());
  image.height = static_cast<png_uint_32>(frame.height());
  image.format = bit_depth == 16 ? PNG_FORMAT_LINEAR_Y : PNG_FORMAT_GRAY;
  const double maxval = bit_depth == 8 ? 255.0 : 65535.0;
  int ok = 0;
  if (bit_depth == 16) {
    std::vector<std::uint16_t> buf(frame.size());
    std::transform(frame.values().begin(), frame.values().end(), buf.begin(), [&](double v) {
      return static_cast<std::uint16_t>(std::clamp(std::round(v), 0.0, maxval));
    });
    ok = png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr);
  } else {
    std::vector<std::uint8_t> buf(frame.size());
    std::transform(frame.values().begin(), frame.values().end(), buf.begin(), [&](double v) {
      return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, maxval));
    });
    ok = png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr);
  }
  if (!ok) throw IoError("cannot write " + path.string() + ": " + image.message);
}

void check_depth(int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16)
    throw std::invalid_argument("bit depth must be 8 or 16, got " + std::to_string(bit_depth));
}

}  // namespace

Frame read_image(const fs::path& path, ImageFormat format) {
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  return format == ImageFormat::kPgm ? read_pgm(path) : read_png(path);
}

Frame read_image(const fs::path& path) { return read_image(path, format_from_path(path)); }

void write_image(const Frame& frame, const fs::path& path, ImageFormat format, int bit_depth) {
  check_depth(bit_depth);
  if (format == ImageFormat::kPgm)
    write_pgm(frame, path, bit_depth);
  else
    write_png(frame, path, bit_depth);
}

void write_image(const Frame& frame, const fs::path& path, int bit_depth) {
  write_image(frame, path, format_from_path(path), bit_depth);
}

FrameStack load_stack(const fs::path& directory) {
  if (!fs::is_directory(directory)) throw IoError("not a directory: " + directory.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    try {
      format_from_path(entry.path());
      files.push_back(entry.path());
    } catch (const std::invalid_argument&) {
    }
  }
  return load_stack(std::move(files));
}

FrameStack load_stack(std::vector<fs::path> files) {
  if (files.empty()) throw std::invalid_argument("load_stack: no input images");
  std::sort(files.begin(), files.end());
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) {
    frames.push_back(read_image(f));
    if (!frames.back().same_shape(frames.front())) {
      throw std::invalid_argument("load_stack: " + f.string() + " is " +
                                  std::to_string(frames.back().width()) + "x" +
                                  std::to_string(frames.back().height()) + ", expected " +
                                  std::to_string(frames.front().width()) + "x" +
                                  std::to_string(frames.front().height()));
    }
  }
  return FrameStack(std::move(frames));
}

}  // namespace mfbm3d
