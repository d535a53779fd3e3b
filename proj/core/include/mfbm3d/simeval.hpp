#pragma once

// Poisson noise simulation, PSNR scoring and the benchmark grid over test
// images, noise peaks, frame counts and methods.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfbm3d/extensions.hpp"
#include "mfbm3d/image.hpp"

namespace mfbm3d {

struct NoiseSpec {
  double peak = 1.0;        ///< Poisson mean at the brightest clean pixel
  int realisations = 5;     ///< number of frames
  std::uint64_t seed = 0;

  void validate() const;
};

/// Mean field used for sampling: peak * clean / max(clean).
Frame intensity_to_rate(const Frame& clean, double peak);

/// Inverse of intensity_to_rate: estimate * max(clean) / peak.
Frame rate_to_intensity(const Frame& estimate, double clean_max, double peak);

/// Draws spec.realisations independent Poisson frames from the rate field.
/// Frame i uses its own generator stream derived from (seed, i).
FrameStack add_poisson(const Frame& clean, const NoiseSpec& spec);

/// 10 log10(range^2 / MSE). Returns +infinity when the images are equal.
double psnr(const Frame& estimate, const Frame& reference, double range = 255.0);

struct ResultRow {
  std::string image;
  double peak = 0.0;
  int frames = 0;
  std::string method;
  std::optional<double> sigma_lp;
  double psnr = 0.0;
  std::optional<int> ref_frame;  ///< best reference frame for bm3d3

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ExperimentCell {
  std::string image;
  double peak = 1.0;
  int frames = 5;
};

struct ExperimentSpec {
  std::vector<ExperimentCell> cells;
  std::vector<MethodKind> methods{MethodKind::kBm3d1, MethodKind::kBm3d2, MethodKind::kBm3d3,
                                  MethodKind::kBm3d4, MethodKind::kBm3d4Sigma};
  /// Candidate low-pass parameters for bm3d4_sigma; the best one is reported.
  std::vector<double> sigma_grid{95.0};
  /// bm3d3 is run with every frame as reference and the best PSNR kept.
  bool bm3d3_best_reference = true;
  int bm3d3_ref_frame = 0;  ///< used when bm3d3_best_reference is false
  std::uint64_t seed = 0;
  DenoiseOptions options;
  /// Cells processed concurrently; each cell's engine runs with options.engine.jobs.
  int cell_jobs = 1;

  /// Full grid over the given images, peaks 1..5 and frame counts.
  static ExperimentSpec grid(const std::vector<std::string>& images,
                             const std::vector<double>& peaks, const std::vector<int>& frame_counts);
};

/// Seed of the noisy dataset for one cell; identical for every method so all
/// methods see the same data.
std::uint64_t cell_seed(std::uint64_t base, const ExperimentCell& cell);

/// Resolves an image name to its clean frame.
using ImageSource = std::function<Frame(const std::string& name)>;

/// Loads <dir>/<name>.pgm (or .png). Throws IoError when missing.
ImageSource directory_image_source(const std::filesystem::path& dir);

/// Runs every (cell, method) pair; rows come back in spec order.
/// `progress`, when set, is called after each row is produced.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const ImageSource& images,
                                      const std::function<void(const ResultRow&)>& progress = {});

/// CSV with header: image,peak,L,method,sigma_lp,psnr
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

/// Text table with one line per (image, peak, L) and one column per method.
void write_table(std::ostream& out, const std::vector<ResultRow>& rows);

/// Published PSNR for an (image, peak, L, method) cell of the reference
/// results, or nullopt when the cell is not part of them. For bm3d4_sigma
/// `sigma_out` receives the low-pass parameter reported with it.
std::optional<double> published_psnr(const std::string& image, int peak, int frames,
                                     MethodKind method, double* sigma_out = nullptr);

}  // namespace mfbm3d
