#include "mfbm3d/simeval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mfbm3d/errors.hpp"
#include "mfbm3d/parallel.hpp"
#include "mfbm3d/poisson.hpp"

namespace mfbm3d {

void NoiseSpec::validate() const {
  if (!(peak > 0.0)) throw std::invalid_argument("noise peak must be > 0");
  if (realisations < 1) throw std::invalid_argument("realisations must be >= 1");
}

namespace {

double frame_max(const Frame& f) {
  if (f.empty()) throw std::invalid_argument("empty frame");
  return *std::max_element(f.values().begin(), f.values().end());
}

}  // namespace

Frame intensity_to_rate(const Frame& clean, double peak) {
  const double mx = frame_max(clean);
  if (!(mx > 0.0)) throw std::invalid_argument("clean image is all zero");
  Frame out(clean.width(), clean.height());
  auto src = clean.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] < 0.0) throw std::invalid_argument("clean image has negative values");
    dst[i] = peak * src[i] / mx;
  }
  return out;
}

Frame rate_to_intensity(const Frame& estimate, double clean_max, double peak) {
  Frame out(estimate.width(), estimate.height());
  const double scale = clean_max / peak;
  auto src = estimate.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * scale;
  return out;
}

FrameStack add_poisson(const Frame& clean, const NoiseSpec& spec) {
  spec.validate();
  const Frame rate = intensity_to_rate(clean, spec.peak);
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(spec.realisations));
  for (int i = 0; i < spec.realisations; ++i) {
    PoissonSampler sampler(spec.seed, static_cast<std::uint64_t>(i));
    Frame f(rate.width(), rate.height());
    auto src = rate.values();
    auto dst = f.values();
    for (std::size_t p = 0; p < src.size(); ++p) dst[p] = static_cast<double>(sampler(src[p]));
    frames.push_back(std::move(f));
  }
  return FrameStack(std::move(frames));
}

double psnr(const Frame& estimate, const Frame& reference, double range) {
  if (!estimate.same_shape(reference)) throw std::invalid_argument("psnr: dimension mismatch");
  if (reference.empty()) throw std::invalid_argument("psnr: empty images");
  double sse = 0.0;
  auto a = estimate.values();
  auto b = reference.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(a.size());
  return 10.0 * std::log10(range * range / mse);
}

ExperimentSpec ExperimentSpec::grid(const std::vector<std::string>& images,
                                    const std::vector<double>& peaks,
                                    const std::vector<int>& frame_counts) {
  ExperimentSpec spec;
  for (int frames : frame_counts)
    for (const auto& image : images)
      for (double peak : peaks) spec.cells.push_back({image, peak, frames});
  return spec;
}

std::uint64_t cell_seed(std::uint64_t base, const ExperimentCell& cell) {
  // FNV-1a over the cell identity.
  std::uint64_t h = 0xcbf29ce484222325ULL ^ base;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (unsigned char c : cell.image) mix(c);
  mix(static_cast<std::uint64_t>(std::llround(cell.peak * 1000.0)));
  mix(static_cast<std::uint64_t>(cell.frames));
  return h;
}

ImageSource directory_image_source(const std::filesystem::path& dir) {
  return [dir](const std::string& name) {
    for (const char* ext : {".pgm", ".png"}) {
      const auto p = dir / (name + ext);
      if (std::filesystem::exists(p)) return read_image(p);
    }
    throw IoError("missing image asset '" + name + "' in " + dir.string() +
                  " (run `mfbm3d fetch-assets` to download the test images)");
  };
}

namespace {

std::vector<ResultRow> run_cell(const ExperimentSpec& spec, const ExperimentCell& cell,
                                const Frame& clean) {
  const NoiseSpec noise{cell.peak, cell.frames, cell_seed(spec.seed, cell)};
  const FrameStack noisy = add_poisson(clean, noise);
  const double clean_max = frame_max(clean);
  auto score = [&](const Frame& est) {
    return psnr(rate_to_intensity(est, clean_max, cell.peak), clean);
  };

  std::vector<ResultRow> rows;
  for (MethodKind kind : spec.methods) {
    ResultRow row{cell.image, cell.peak, cell.frames, to_string(kind), std::nullopt, 0.0, std::nullopt};
    switch (kind) {
      case MethodKind::kBm3d3: {
        std::vector<int> refs;
        if (spec.bm3d3_best_reference) {
          for (int r = 0; r < cell.frames; ++r) refs.push_back(r);
        } else {
          refs.push_back(spec.bm3d3_ref_frame);
        }
        row.psnr = -std::numeric_limits<double>::infinity();
        for (int r : refs) {
          const double p = score(denoise(noisy, Method::bm3d3(r), spec.options));
          if (p > row.psnr) {
            row.psnr = p;
            row.ref_frame = r;
          }
        }
        break;
      }
      case MethodKind::kBm3d4Sigma: {
        if (spec.sigma_grid.empty()) throw std::invalid_argument("empty sigma_lp grid");
        row.psnr = -std::numeric_limits<double>::infinity();
        for (double s : spec.sigma_grid) {
          const double p = score(denoise(noisy, Method::bm3d4_sigma(s), spec.options));
          if (p > row.psnr) {
            row.psnr = p;
            row.sigma_lp = s;
          }
        }
        break;
      }
      default:
        row.psnr = score(denoise(noisy, Method{kind}, spec.options));
        break;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const ImageSource& images,
                                      const std::function<void(const ResultRow&)>& progress) {
  // Resolve every asset up front so a missing image fails before any work.
  std::map<std::string, Frame> clean;
  for (const auto& cell : spec.cells)
    if (!clean.contains(cell.image)) clean.emplace(cell.image, images(cell.image));

  std::vector<std::vector<ResultRow>> per_cell(spec.cells.size());
  std::mutex progress_mutex;
  parallel_for(spec.cells.size(), spec.cell_jobs, [&](std::size_t i) {
    per_cell[i] = run_cell(spec, spec.cells[i], clean.at(spec.cells[i].image));
    if (progress) {
      std::lock_guard lock(progress_mutex);
      for (const auto& r : per_cell[i]) progress(r);
    }
  });
  std::vector<ResultRow> rows;
  for (auto& cell_rows : per_cell)
    for (auto& r : cell_rows) rows.push_back(std::move(r));
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "image,peak,L,method,sigma_lp,psnr\n";
  for (const auto& r : rows) {
    out << r.image << ',' << r.peak << ',' << r.frames << ',' << r.method << ',';
    if (r.sigma_lp) out << *r.sigma_lp;
    out << ',' << std::fixed << std::setprecision(4) << r.psnr << std::defaultfloat << '\n';
  }
}

void write_table(std::ostream& out, const std::vector<ResultRow>& rows) {
  struct Line {
    std::string label;
    int frames;
    std::map<std::string, const ResultRow*> cols;
  };
  std::vector<Line> lines;
  for (const auto& r : rows) {
    std::ostringstream label;
    std::string name = r.image;
    if (!name.empty()) name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    label << name << " (" << r.peak << ")";
    if (lines.empty() || lines.back().label != label.str() || lines.back().frames != r.frames)
      lines.push_back({label.str(), r.frames, {}});
    lines.back().cols[r.method] = &r;
  }
  const std::array<std::pair<const char*, const char*>, 5> columns{{{"bm3d1", "BM-1"},
                                                                   {"bm3d2", "BM-2"},
                                                                   {"bm3d3", "BM-3"},
                                                                   {"bm3d4", "BM-M"},
                                                                   {"bm3d4_sigma", "s/ BM-M_s"}}};
  int current_frames = -1;
  for (const auto& line : lines) {
    if (line.frames != current_frames) {
      current_frames = line.frames;
      out << "\n" << current_frames << "-image datasets\n";
      out << std::left << std::setw(14) << "Image";
      for (const auto& [key, title] : columns) out << std::right << std::setw(12) << title;
      out << "\n";
    }
    out << std::left << std::setw(14) << line.label << std::right;
    for (const auto& [key, title] : columns) {
      const auto it = line.cols.find(key);
      std::ostringstream cell;
      if (it != line.cols.end()) {
        if (it->second->sigma_lp) cell << *it->second->sigma_lp << "/ ";
        cell << std::fixed << std::setprecision(2) << it->second->psnr;
      } else {
        cell << "-";
      }
      out << std::setw(12) << cell.str();
    }
    out << "\n";
  }
}

namespace {

struct PublishedRow {
  const char* image;
  int peak;
  int frames;
  std::array<double, 4> psnr;  // bm3d1..bm3d4
  double sigma_lp;
  double psnr_sigma;
};

// clang-format off
constexpr PublishedRow kPublished[] = {
    {"house", 1, 5, {18.29, 22.73, 22.94, 24.28}, 95, 24.74},
    {"house", 2, 5, {21.19, 26.02, 25.53, 27.11}, 100, 27.28},
    {"house", 3, 5, {23.15, 27.29, 26.49, 28.13}, 110, 28.32},
    {"house", 4, 5, {24.69, 28.14, 27.23, 29.06}, 105, 29.32},
    {"house", 5, 5, {25.97, 28.87, 27.91, 29.74}, 120, 29.92},
    {"lena", 1, 5, {19.00, 24.54, 23.90, 25.33}, 195, 25.88},
    {"lena", 2, 5, {21.64, 26.53, 25.82, 27.31}, 200, 27.50},
    {"lena", 3, 5, {23.43, 27.67, 26.77, 28.44}, 220, 28.62},
    {"lena", 4, 5, {24.84, 28.33, 27.41, 29.13}, 215, 29.24},
    {"lena", 5, 5, {25.86, 28.94, 27.95, 29.67}, 210, 29.82},
    {"bridge", 1, 5, {18.02, 20.79, 20.40, 21.16}, 130, 21.85},
    {"bridge", 2, 5, {19.85, 21.93, 21.50, 22.36}, 145, 22.88},
    {"bridge", 3, 5, {20.95, 22.59, 22.08, 23.08}, 140, 23.55},
    {"bridge", 4, 5, {21.73, 23.04, 22.48, 23.55}, 145, 24.00},
    {"bridge", 5, 5, {22.26, 23.38, 22.80, 23.89}, 145, 24.33},
    {"peppers", 1, 5, {20.48, 24.75, 23.97, 25.53}, 170, 26.10},
    {"peppers", 2, 5, {22.78, 26.68, 25.83, 27.46}, 195, 27.63},
    {"peppers", 3, 5, {24.49, 27.69, 26.77, 28.41}, 205, 28.54},
    {"peppers", 4, 5, {25.64, 28.42, 27.48, 29.14}, 205, 29.24},
    {"peppers", 5, 5, {26.50, 28.89, 27.94, 29.57}, 205, 29.67},
    {"house", 1, 10, {17.55, 22.98, 23.34, 25.20}, 80, 26.11},
    {"house", 2, 10, {20.51, 26.41, 25.79, 27.93}, 90, 28.26},
    {"house", 3, 10, {22.67, 27.77, 26.73, 29.26}, 105, 29.58},
    {"house", 4, 10, {24.25, 28.60, 27.55, 30.09}, 100, 30.48},
    {"house", 5, 10, {25.60, 29.28, 28.23, 30.73}, 100, 31.06},
    {"lena", 1, 10, {18.16, 24.78, 24.12, 25.95}, 165, 26.91},
    {"lena", 2, 10, {20.98, 26.92, 26.07, 28.24}, 180, 28.71},
    {"lena", 3, 10, {22.92, 28.05, 26.99, 29.41}, 195, 29.75},
    {"lena", 4, 10, {24.42, 28.75, 27.64, 30.13}, 195, 30.42},
    {"lena", 5, 10, {25.55, 29.28, 28.08, 30.64}, 195, 30.94},
    {"bridge", 1, 10, {17.41, 20.90, 20.53, 21.46}, 115, 22.53},
    {"bridge", 2, 10, {19.49, 22.10, 21.64, 22.86}, 130, 23.66},
    {"bridge", 3, 10, {20.77, 22.72, 22.18, 23.61}, 135, 24.32},
    {"bridge", 4, 10, {21.62, 23.20, 22.61, 24.19}, 145, 24.81},
    {"bridge", 5, 10, {22.23, 23.55, 22.90, 24.57}, 145, 25.15},
    {"peppers", 1, 10, {19.65, 24.99, 24.20, 26.22}, 160, 27.07},
    {"peppers", 2, 10, {22.16, 26.99, 26.09, 28.30}, 175, 28.71},
    {"peppers", 3, 10, {23.99, 28.02, 26.95, 29.31}, 180, 29.60},
    {"peppers", 4, 10, {25.23, 28.78, 27.65, 30.03}, 175, 30.25},
    {"peppers", 5, 10, {26.14, 29.24, 28.12, 30.47}, 185, 30.69},
};
// clang-format on

}  // namespace

std::optional<double> published_psnr(const std::string& image, int peak, int frames,
                                     MethodKind method, double* sigma_out) {
  for (const auto& row : kPublished) {
    if (image != row.image || peak != row.peak || frames != row.frames) continue;
    switch (method) {
      case MethodKind::kBm3d1:
        return row.psnr[0];
      case MethodKind::kBm3d2:
        return row.psnr[1];
      case MethodKind::kBm3d3:
        return row.psnr[2];
      case MethodKind::kBm3d4:
        return row.psnr[3];
      case MethodKind::kBm3d4Sigma:
        if (sigma_out) *sigma_out = row.sigma_lp;
        return row.psnr_sigma;
    }
  }
  return std::nullopt;
}

}  // namespace mfbm3d
