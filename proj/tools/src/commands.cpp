#include "mfbm3d_cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mfbm3d/errors.hpp"
#include "mfbm3d/extensions.hpp"
#include "mfbm3d/image.hpp"
#include "mfbm3d/simeval.hpp"
#include "mfbm3d_cli/config_file.hpp"

namespace fs = std::filesystem;

namespace mfbm3d::cli {

std::string default_asset_dir() {
  if (const char* env = std::getenv("MFBM3D_ASSET_DIR"); env && *env) return env;
  if (const char* home = std::getenv("HOME"); home && *home)
    return (fs::path(home) / ".cache" / "mfbm3d" / "assets").string();
  return "assets";
}

namespace {

#ifndef MFBM3D_FETCH_SCRIPT
#define MFBM3D_FETCH_SCRIPT "scripts/fetch_assets.py"
#endif

// ---------------------------------------------------------------------------
// Option registry: every flag can also be set from the config file and is
// echoed in the effective configuration.

// Shortest form that reads back to the same double.
std::string format_value(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}
std::string format_value(int v) { return std::to_string(v); }
std::string format_value(std::uint64_t v) { return std::to_string(v); }
std::string format_value(const std::string& v) { return v; }
template <typename T>
std::string format_value(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_value(v[i]);
  }
  return out;
}

template <typename T>
T parse_scalar(const std::string& key, const std::string& text) {
  if constexpr (std::is_same_v<T, std::string>) {
    return text;
  } else {
    std::istringstream in(text);
    T v{};
    in >> v;
    if (!in || !(in >> std::ws).eof())
      throw std::invalid_argument("config: bad value '" + text + "' for " + key);
    return v;
  }
}

template <typename T>
void parse_into(const std::string& key, const std::string& text, T& out) {
  out = parse_scalar<T>(key, text);
}

template <typename T>
void parse_into(const std::string& key, const std::string& text, std::vector<T>& out) {
  out.clear();
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(parse_scalar<T>(key, item.substr(b, e - b + 1)));
  }
}

class Registry {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& name, T& var, const std::string& desc) {
    entries_.push_back({name, [&var, name](const std::string& s) { parse_into(name, s, var); },
                        [&var] { return format_value(var); }});
    auto* opt = app->add_option("--" + name, var, desc);
    if constexpr (!std::is_same_v<T, std::string>) opt->capture_default_str();
    if constexpr (requires { var.push_back(var.front()); }) opt->delimiter(',');
    return opt;
  }

  void apply(const std::map<std::string, std::string>& values) {
    for (const auto& [raw_key, value] : values) {
      std::string key = raw_key;
      std::replace(key.begin(), key.end(), '_', '-');
      auto it = std::find_if(entries_.begin(), entries_.end(),
                             [&](const Entry& e) { return e.name == key; });
      if (it == entries_.end()) throw std::invalid_argument("config: unknown key '" + raw_key + "'");
      it->set(value);
    }
  }

  void print(std::ostream& out, const std::string& command) const {
    out << "# effective configuration\n# command = " << command << '\n';
    for (const auto& e : entries_) out << "# " << e.name << " = " << e.get() << '\n';
  }

 private:
  struct Entry {
    std::string name;
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
  };
  std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Engine flags shared by denoise and reproduce-table1.

struct EngineFlags {
  double lambda3d = 2.7;
  double kaiser_beta = 2.0;
  int search_radius = 19;
  int stride = 3;
  int group1 = 16;
  int group2 = 32;
  std::string step1_basis = "bior15";
  std::string step2_basis = "dct";
  std::string step2_match = "cross-frame";
  std::string lowpass_shape = "radial";
  std::string noise = "poisson";
  double sigma = 0.0;
  int jobs = 1;

  void add(CLI::App* app, Registry& reg) {
    reg.add(app, "lambda3d", lambda3d, "hard-threshold factor");
    reg.add(app, "kaiser-beta", kaiser_beta, "Kaiser window parameter for aggregation");
    reg.add(app, "search-radius", search_radius, "block-matching search radius in pixels");
    reg.add(app, "stride", stride, "step between reference patches");
    reg.add(app, "group1", group1, "maximum group size, first step (power of two)");
    reg.add(app, "group2", group2, "maximum group size, second step (power of two)");
    reg.add(app, "step1-basis", step1_basis, "2D transform of the first step (bior15|dct)");
    reg.add(app, "step2-basis", step2_basis, "2D transform of the second step (bior15|dct)");
    reg.add(app, "step2-match", step2_match,
            "second-step matching source (cross-frame|per-frame)");
    reg.add(app, "lowpass-shape", lowpass_shape, "prefilter roll-off (radial|per-component)");
    reg.add(app, "noise", noise, "noise model of the input (poisson|gaussian)");
    reg.add(app, "sigma", sigma, "noise std for --noise gaussian");
    reg.add(app, "jobs", jobs, "worker threads (0 = all cores); results do not depend on it");
  }

  DenoiseOptions resolve() const {
    DenoiseOptions o;
    o.engine.lambda3d = lambda3d;
    o.engine.kaiser_beta = kaiser_beta;
    o.engine.step1.search_radius = search_radius;
    o.engine.step2.search_radius = search_radius;
    o.engine.step1.stride = stride;
    o.engine.step2.stride = stride;
    o.engine.step1.max_group = group1;
    o.engine.step2.max_group = group2;
    o.engine.step1_basis = basis_from_string(step1_basis);
    o.engine.step2_basis = basis_from_string(step2_basis);
    o.engine.jobs = jobs;
    if (step2_match == "cross-frame") {
      o.engine.step2_match = Step2Match::kCrossFrame;
    } else if (step2_match == "per-frame") {
      o.engine.step2_match = Step2Match::kPerFrame;
    } else {
      throw std::invalid_argument("unknown step2 match source '" + step2_match + "'");
    }
    if (lowpass_shape == "radial") {
      o.lowpass_shape = LowPassShape::kRadial;
    } else if (lowpass_shape == "per-component") {
      o.lowpass_shape = LowPassShape::kPerComponent;
    } else {
      throw std::invalid_argument("unknown lowpass shape '" + lowpass_shape + "'");
    }
    if (noise == "poisson") {
      o.stabilize = true;
    } else if (noise == "gaussian") {
      if (!(sigma > 0.0)) throw std::invalid_argument("--noise gaussian requires --sigma > 0");
      o.stabilize = false;
      o.gaussian_sigma = sigma;
    } else {
      throw std::invalid_argument("unknown noise model '" + noise + "'");
    }
    if (jobs < 0) throw std::invalid_argument("--jobs must be >= 0");
    // Validate the search settings before any computation; the engine sigma
    // is only known later, so check with a placeholder.
    EngineConfig probe = o.engine;
    probe.sigma = 1.0;
    probe.validate();
    probe.step1.validate();
    probe.step2.validate();
    return o;
  }
};

// ---------------------------------------------------------------------------
// Subcommand state. Each command owns its variables so CLI11 can bind them.

struct DenoiseCmd {
  std::string method;
  std::vector<std::string> frames;
  std::string out;
  int ref_frame = -1;
  double sigma_lp = 95.0;
  std::string reference;
  double peak = 0.0;
  double scale = 0.0;
  int bit_depth = 8;
  EngineFlags engine;
};

struct SimulateCmd {
  std::string input;
  double peak = 1.0;
  int frames = 5;
  std::uint64_t seed = 0;
  std::string out_dir;
};

struct EvaluateCmd {
  std::string estimate;
  std::string reference;
  double range = 255.0;
};

struct ReproduceCmd {
  std::string assets;
  std::vector<std::string> subset;
  std::vector<std::string> images{"house", "lena", "peppers", "bridge"};
  std::vector<double> peaks{1, 2, 3, 4, 5};
  std::vector<int> frames{5, 10};
  std::vector<std::string> methods{"bm3d1", "bm3d2", "bm3d3", "bm3d4", "bm3d4_sigma"};
  std::vector<double> sigma_grid{95.0};
  int bm3d3_ref = -1;
  std::uint64_t seed = 0;
  std::string csv;
  std::string table;
  int cell_jobs = 1;
  EngineFlags engine;
};

struct FetchCmd {
  std::string dest;
  std::string script;
  std::string python = "python3";
};

// "house:peak1:L5" -> cell
ExperimentCell parse_subset(const std::string& text) {
  std::vector<std::string> parts;
  std::istringstream in(text);
  std::string p;
  while (std::getline(in, p, ':')) parts.push_back(p);
  auto bad = [&] {
    return std::invalid_argument("bad --subset entry '" + text + "' (expected image:peakN:LM)");
  };
  if (parts.size() != 3 || parts[0].empty() || parts[1].rfind("peak", 0) != 0 ||
      parts[2].size() < 2 || parts[2][0] != 'L')
    throw bad();
  ExperimentCell cell;
  cell.image = parts[0];
  try {
    std::size_t used = 0;
    cell.peak = std::stod(parts[1].substr(4), &used);
    if (used != parts[1].size() - 4) throw bad();
    cell.frames = std::stoi(parts[2].substr(1), &used);
    if (used != parts[2].size() - 1) throw bad();
  } catch (const std::logic_error&) {
    throw bad();
  }
  if (!(cell.peak > 0.0) || cell.frames < 1) throw bad();
  return cell;
}

double frame_max(const Frame& f) {
  return *std::max_element(f.values().begin(), f.values().end());
}

FrameStack load_frames(const std::vector<std::string>& inputs) {
  if (inputs.size() == 1 && fs::is_directory(inputs.front())) return load_stack(fs::path(inputs.front()));
  std::vector<fs::path> paths(inputs.begin(), inputs.end());
  return load_stack(paths);
}

// ---------------------------------------------------------------------------

int do_denoise(DenoiseCmd& c, std::ostream& out) {
  const MethodKind kind = method_kind_from_string(c.method);
  if (kind == MethodKind::kBm3d3 && c.ref_frame < 0)
    throw std::invalid_argument("--method bm3d3 requires --ref-frame");
  if (kind == MethodKind::kBm3d4Sigma && !(c.sigma_lp > 0.0))
    throw std::invalid_argument("--sigma-lp must be > 0");
  if (c.bit_depth != 8 && c.bit_depth != 16) throw std::invalid_argument("--bit-depth must be 8 or 16");
  if (c.peak < 0.0 || c.scale < 0.0) throw std::invalid_argument("--peak and --scale must be >= 0");
  const DenoiseOptions options = c.engine.resolve();
  Method method{kind, c.ref_frame < 0 ? 0 : c.ref_frame, c.sigma_lp};

  const FrameStack stack = load_frames(c.frames);
  std::optional<Frame> reference;
  if (!c.reference.empty()) {
    reference = read_image(c.reference);
    if (!reference->same_shape(stack[0]))
      throw std::invalid_argument("--reference has a different size than the frames");
  }
  out << "# frames = " << stack.size() << " x " << stack.width() << "x" << stack.height() << '\n';

  const Frame estimate = denoise(stack, method, options);

  // Map counts back to intensities when the acquisition peak is known.
  double scale = c.scale;
  if (scale == 0.0) scale = (reference && c.peak > 0.0) ? frame_max(*reference) / c.peak : 1.0;
  Frame result = estimate;
  for (double& v : result.values()) v *= scale;
  write_image(result, c.out, format_from_path(c.out), c.bit_depth);
  out << "wrote " << c.out << " (scale " << scale << ")\n";
  if (reference) out << "psnr = " << std::fixed << std::setprecision(4) << psnr(result, *reference) << '\n';
  return kExitOk;
}

int do_simulate(SimulateCmd& c, std::ostream& out) {
  NoiseSpec spec{c.peak, c.frames, c.seed};
  spec.validate();
  const Frame clean = read_image(c.input);
  const FrameStack noisy = add_poisson(clean, spec);
  fs::create_directories(c.out_dir);
  double mx = 0.0;
  for (const auto& f : noisy) mx = std::max(mx, frame_max(f));
  const int depth = mx > 255.0 ? 16 : 8;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.pgm", i);
    const fs::path p = fs::path(c.out_dir) / name;
    write_image(noisy[i], p, ImageFormat::kPgm, depth);
    out << "wrote " << p.string() << '\n';
  }
  out << "# clean_max = " << frame_max(clean) << " (multiply counts by clean_max/peak for intensities)\n";
  return kExitOk;
}

int do_evaluate(EvaluateCmd& c, std::ostream& out) {
  if (!(c.range > 0.0)) throw std::invalid_argument("--range must be > 0");
  const Frame est = read_image(c.estimate);
  const Frame ref = read_image(c.reference);
  out << "psnr = " << std::fixed << std::setprecision(4) << psnr(est, ref, c.range) << '\n';
  return kExitOk;
}

int do_reproduce(ReproduceCmd& c, std::ostream& out) {
  ExperimentSpec spec;
  if (!c.subset.empty()) {
    for (const auto& s : c.subset) spec.cells.push_back(parse_subset(s));
  } else {
    spec = ExperimentSpec::grid(c.images, c.peaks, c.frames);
  }
  if (spec.cells.empty()) throw std::invalid_argument("no cells selected");
  spec.methods.clear();
  for (const auto& m : c.methods) spec.methods.push_back(method_kind_from_string(m));
  if (spec.methods.empty()) throw std::invalid_argument("no methods selected");
  spec.sigma_grid = c.sigma_grid;
  for (double s : spec.sigma_grid)
    if (!(s > 0.0)) throw std::invalid_argument("--sigma-grid values must be > 0");
  spec.bm3d3_best_reference = c.bm3d3_ref < 0;
  spec.bm3d3_ref_frame = std::max(c.bm3d3_ref, 0);
  spec.seed = c.seed;
  spec.cell_jobs = c.cell_jobs;
  spec.options = c.engine.resolve();
  if (!spec.options.stabilize) throw std::invalid_argument("reproduce-table1 needs --noise poisson");
  if (c.cell_jobs < 0) throw std::invalid_argument("--cell-jobs must be >= 0");

  // Fail on missing assets before running anything.
  const fs::path dir = c.assets;
  for (const auto& cell : spec.cells) {
    if (!fs::exists(dir / (cell.image + ".pgm")) && !fs::exists(dir / (cell.image + ".png")))
      throw IoError("missing test image '" + cell.image + "' in " + dir.string() +
                    "; run `mfbm3d fetch-assets --dest " + dir.string() +
                    "` (or set MFBM3D_ASSET_DIR) first");
  }

  out << "image,peak,L,method,sigma_lp,psnr,published\n";
  auto rows = run_experiment(spec, directory_image_source(dir), [&](const ResultRow& r) {
    double pub_sigma = 0.0;
    const auto pub = published_psnr(r.image, static_cast<int>(std::lround(r.peak)), r.frames,
                                    method_kind_from_string(r.method), &pub_sigma);
    out << r.image << ',' << r.peak << ',' << r.frames << ',' << r.method << ','
        << (r.sigma_lp ? format_value(*r.sigma_lp) : "") << ',' << std::fixed << std::setprecision(2)
        << r.psnr << ',' << (pub ? format_value(*pub) : "") << std::defaultfloat << '\n'
        << std::flush;
  });

  if (!c.csv.empty()) {
    std::ofstream f(c.csv);
    if (!f) throw IoError("cannot write " + c.csv);
    write_csv(f, rows);
  }
  std::ostringstream table;
  write_table(table, rows);
  if (!c.table.empty()) {
    std::ofstream f(c.table);
    if (!f) throw IoError("cannot write " + c.table);
    f << table.str();
  }
  out << '\n' << table.str();
  return kExitOk;
}

int do_fetch(FetchCmd& c, std::ostream& out) {
  std::string script = c.script;
  if (script.empty()) {
    const char* env = std::getenv("MFBM3D_FETCH_SCRIPT");
    script = env && *env ? env : MFBM3D_FETCH_SCRIPT;
  }
  if (!fs::exists(script)) throw IoError("fetch script not found: " + script);
  const std::string cmd = c.python + " \"" + script + "\" --dest \"" + c.dest + "\"";
  out << "running: " << cmd << '\n' << std::flush;
  const int rc = std::system(cmd.c_str());
  if (rc != 0) throw IoError("asset download failed (exit status " + std::to_string(rc) + ")");
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-frame BM3D denoising for Poisson image stacks", "mfbm3d"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  std::map<CLI::App*, Registry> registries;
  std::map<CLI::App*, std::string> config_paths;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_paths[sub],
                    "key = value file; its entries override command-line flags");
  };

  DenoiseCmd den;
  auto* d = app.add_subcommand("denoise", "denoise a stack of registered frames");
  {
    auto& r = registries[d];
    r.add(d, "method", den.method, "bm3d1|bm3d2|bm3d3|bm3d4|bm3d4_sigma");
    r.add(d, "frames", den.frames, "input frames (files or one directory)");
    r.add(d, "out", den.out, "output image (.pgm or .png)");
    r.add(d, "ref-frame", den.ref_frame, "reference frame for bm3d3 (required there)");
    r.add(d, "sigma-lp", den.sigma_lp, "prefilter parameter for bm3d4_sigma");
    r.add(d, "reference", den.reference, "clean image; prints the PSNR of the result");
    r.add(d, "peak", den.peak, "acquisition peak; with --reference maps counts to intensities");
    r.add(d, "scale", den.scale, "multiply the estimate by this before writing (0 = auto)");
    r.add(d, "bit-depth", den.bit_depth, "output bit depth (8|16)");
    den.engine.add(d, r);
    add_config(d);
  }

  SimulateCmd sim;
  auto* s = app.add_subcommand("simulate", "draw Poisson frames from a clean image");
  {
    auto& r = registries[s];
    r.add(s, "input", sim.input, "clean image");
    r.add(s, "peak", sim.peak, "Poisson mean at the brightest pixel");
    r.add(s, "frames", sim.frames, "number of frames L");
    r.add(s, "seed", sim.seed, "random seed");
    r.add(s, "out-dir", sim.out_dir, "directory for frame_000.pgm ...");
    add_config(s);
  }

  EvaluateCmd ev;
  auto* e = app.add_subcommand("evaluate", "PSNR of an estimate against a reference");
  {
    auto& r = registries[e];
    r.add(e, "estimate", ev.estimate, "estimated image");
    r.add(e, "reference", ev.reference, "clean image");
    r.add(e, "range", ev.range, "peak signal value");
    add_config(e);
  }

  ReproduceCmd rep;
  rep.assets = default_asset_dir();
  auto* t = app.add_subcommand("reproduce-table1", "run the benchmark grid and print PSNR tables");
  {
    auto& r = registries[t];
    r.add(t, "assets", rep.assets, "directory with the clean test images");
    r.add(t, "subset", rep.subset, "cells like house:peak1:L5 (overrides images/peaks/L)");
    r.add(t, "images", rep.images, "images of the full grid");
    r.add(t, "peaks", rep.peaks, "noise peaks of the full grid");
    r.add(t, "frames", rep.frames, "frame counts of the full grid");
    r.add(t, "methods", rep.methods, "methods to run");
    r.add(t, "sigma-grid", rep.sigma_grid, "prefilter parameters tried for bm3d4_sigma");
    r.add(t, "bm3d3-ref", rep.bm3d3_ref, "bm3d3 reference frame (-1 = best of all frames)");
    r.add(t, "seed", rep.seed, "base seed of the noisy datasets");
    r.add(t, "csv", rep.csv, "write results as CSV");
    r.add(t, "table", rep.table, "write the text table");
    r.add(t, "cell-jobs", rep.cell_jobs, "cells processed concurrently");
    rep.engine.add(t, r);
    add_config(t);
  }

  FetchCmd fetch;
  fetch.dest = default_asset_dir();
  auto* f = app.add_subcommand("fetch-assets", "download and checksum the clean test images");
  {
    auto& r = registries[f];
    r.add(f, "dest", fetch.dest, "destination directory");
    r.add(f, "script", fetch.script, "path of fetch_assets.py");
    r.add(f, "python", fetch.python, "python interpreter");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& pe) {
    return app.exit(pe, out, err) == 0 ? kExitOk : kExitBadArgs;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (auto it = config_paths.find(sub); it != config_paths.end() && !it->second.empty())
      registries[sub].apply(parse_config_file(it->second));

    auto require = [&](const std::string& v, const char* flag) {
      if (v.empty()) throw std::invalid_argument(std::string("missing required ") + flag);
    };
    if (sub == d) {
      require(den.method, "--method");
      if (den.frames.empty()) throw std::invalid_argument("missing required --frames");
      require(den.out, "--out");
    } else if (sub == s) {
      require(sim.input, "--input");
      require(sim.out_dir, "--out-dir");
    } else if (sub == e) {
      require(ev.estimate, "--estimate");
      require(ev.reference, "--reference");
    }

    registries[sub].print(out, sub->get_name());
    if (sub == d) return do_denoise(den, out);
    if (sub == s) return do_simulate(sim, out);
    if (sub == e) return do_evaluate(ev, out);
    if (sub == t) return do_reproduce(rep, out);
    return do_fetch(fetch, out);
  } catch (const IoError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitIo;
  } catch (const NumericalError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitBadArgs;
  } catch (const std::out_of_range& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitBadArgs;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace mfbm3d::cli
