#include "mfbm3d/engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mfbm3d/errors.hpp"
#include "mfbm3d/parallel.hpp"

namespace mfbm3d {

namespace {

// Wiener energies below this are treated as this value when forming weights.
constexpr double kMinWienerEnergy = 1e-12;

// Reference rows handled per parallel batch. Fixed so that the scatter order,
// and therefore every floating-point sum, is independent of the job count.
constexpr std::size_t kRowsPerBatch = 16;

struct WorkItem {
  int frame;
  int row;
};

struct RowResult {
  std::vector<MatchedGroup> groups;
  std::vector<FilteredGroup> filtered;
};

std::vector<WorkItem> work_items(const FrameStack& stack, const EngineConfig& cfg,
                                 const SearchConfig& search) {
  std::vector<WorkItem> items;
  const auto rows = reference_positions(stack.height(), search.stride);
  for (int f : cfg.ref_scope.frames(stack.size()))
    for (int r : rows) items.push_back({f, r});
  return items;
}

// Runs `process` on every reference row in fixed-size batches and hands the
// results to `commit` in row order.
template <typename Process, typename Commit>
void for_each_row(const std::vector<WorkItem>& items, int jobs, Process&& process, Commit&& commit) {
  std::vector<RowResult> results;
  for (std::size_t start = 0; start < items.size(); start += kRowsPerBatch) {
    const std::size_t n = std::min(kRowsPerBatch, items.size() - start);
    results.assign(n, RowResult{});
    parallel_for(n, jobs, [&](std::size_t i) { results[i] = process(items[start + i]); });
    for (std::size_t i = 0; i < n; ++i) commit(results[i]);
  }
}

}  // namespace

void EngineConfig::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("engine sigma must be > 0");
  if (!(lambda3d >= 0.0)) throw std::invalid_argument("lambda3d must be >= 0");
  if (!(kaiser_beta >= 0.0)) throw std::invalid_argument("kaiser_beta must be >= 0");
  step1.validate();
  step2.validate();
}

Accumulator::Accumulator(int width, int height)
    : numerator_(width, height, 0.0), denominator_(width, height, 0.0) {}

void Accumulator::add_patch(int row, int col, std::span<const double> values, double weight,
                            const PatchValues& window) {
  for (int i = 0; i < kPatchSize; ++i) {
    double* num = numerator_.row_ptr(row + i) + col;
    double* den = denominator_.row_ptr(row + i) + col;
    for (int j = 0; j < kPatchSize; ++j) {
      const double w = weight * window[i * kPatchSize + j];
      num[j] += w * values[i * kPatchSize + j];
      den[j] += w;
    }
  }
}

void Accumulator::add(int row, int col, double value, double weight) {
  numerator_(row, col) += weight * value;
  denominator_(row, col) += weight;
}

Frame aggregate(const Accumulator& acc) {
  if (acc.numerator().empty()) throw NumericalError("aggregate: empty accumulator");
  Frame out(acc.width(), acc.height());
  const auto num = acc.numerator().values();
  const auto den = acc.denominator().values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (!(den[i] > 0.0)) {
      const int row = static_cast<int>(i / static_cast<std::size_t>(acc.width()));
      const int col = static_cast<int>(i % static_cast<std::size_t>(acc.width()));
      throw NumericalError("aggregate: zero weight at pixel (" + std::to_string(row) + ", " +
                           std::to_string(col) + ")");
    }
    dst[i] = num[i] / den[i];
  }
  return out;
}

FilteredGroup filter_group_hard(std::span<const double> group, double sigma, double lambda3d,
                                Basis basis) {
  FilteredGroup out;
  out.values.assign(group.begin(), group.end());
  forward_3d(out.values, basis);
  out.retained = hard_threshold(out.values, lambda3d * sigma, /*keep_dc=*/true);
  inverse_3d(out.values, basis);
  out.weight = 1.0 / (sigma * sigma * static_cast<double>(std::max<std::size_t>(out.retained, 1)));
  return out;
}

FilteredGroup filter_group_wiener(std::span<const double> noisy, std::span<const double> pilot,
                                  double sigma, Basis basis) {
  if (noisy.size() != pilot.size())
    throw std::invalid_argument("filter_group_wiener: noisy and pilot groups differ in shape");
  FilteredGroup out;
  out.values.assign(noisy.begin(), noisy.end());
  std::vector<double> pilot_spec(pilot.begin(), pilot.end());
  forward_3d(out.values, basis);
  forward_3d(pilot_spec, basis);
  const double energy = wiener_shrink(out.values, pilot_spec, sigma, /*keep_dc=*/true);
  inverse_3d(out.values, basis);
  out.weight = 1.0 / (sigma * sigma * std::max(energy, kMinWienerEnergy));
  return out;
}

HardStageResult hard_stage(const FrameStack& noisy, const FrameStack& match_source,
                           const EngineConfig& cfg) {
  cfg.validate();
  if (noisy.empty()) throw std::invalid_argument("hard_stage: empty stack");
  if (!noisy.same_shape(match_source))
    throw std::invalid_argument("hard_stage: match source and noisy stack differ in shape");
  for (const auto& f : noisy) f.validate();

  const int width = noisy.width();
  const int height = noisy.height();
  const auto cols = reference_positions(width, cfg.step1.stride);
  const PatchValues window = kaiser_window(cfg.kaiser_beta);
  const bool per_frame = cfg.ref_scope.is_all();

  Accumulator combined(width, height);
  std::vector<Accumulator> frames;
  if (per_frame) frames.assign(noisy.size(), Accumulator(width, height));

  auto process = [&](const WorkItem& item) {
    RowResult res;
    res.groups = find_similar_row(item.frame, item.row, cols, match_source, cfg.step1);
    res.filtered.reserve(res.groups.size());
    std::vector<double> buf;
    for (const auto& g : res.groups) {
      buf.resize(g.size() * kPatchArea);
      gather_group(noisy, g.origins, buf);
      res.filtered.push_back(filter_group_hard(buf, cfg.sigma, cfg.lambda3d, cfg.step1_basis));
    }
    return res;
  };
  auto commit = [&](const RowResult& res) {
    for (std::size_t g = 0; g < res.groups.size(); ++g) {
      const auto& origins = res.groups[g].origins;
      const auto& fg = res.filtered[g];
      for (std::size_t k = 0; k < origins.size(); ++k) {
        const auto patch = std::span<const double>(fg.values).subspan(k * kPatchArea, kPatchArea);
        combined.add_patch(origins[k].row, origins[k].col, patch, fg.weight, window);
        if (per_frame)
          frames[static_cast<std::size_t>(origins[k].frame)].add_patch(
              origins[k].row, origins[k].col, patch, fg.weight, window);
      }
    }
  };
  for_each_row(work_items(noisy, cfg, cfg.step1), cfg.jobs, process, commit);

  HardStageResult out;
  out.combined = aggregate(combined);
  std::vector<Frame> estimates;
  estimates.reserve(noisy.size());
  for (std::size_t m = 0; m < noisy.size(); ++m)
    estimates.push_back(per_frame ? aggregate(frames[m]) : out.combined);
  out.per_frame = FrameStack(std::move(estimates));
  return out;
}

Frame wiener_stage(const FrameStack& noisy, const FrameStack& basic, const EngineConfig& cfg) {
  return wiener_stage(noisy, basic, basic, cfg);
}

Frame wiener_stage(const FrameStack& noisy, const FrameStack& match_source,
                   const FrameStack& pilot_source, const EngineConfig& cfg) {
  cfg.validate();
  if (noisy.empty()) throw std::invalid_argument("wiener_stage: empty stack");
  if (!noisy.same_shape(match_source) || !noisy.same_shape(pilot_source))
    throw std::invalid_argument("wiener_stage: basic estimate and noisy stack differ in shape");

  const int width = noisy.width();
  const int height = noisy.height();
  const auto cols = reference_positions(width, cfg.step2.stride);
  const PatchValues window = kaiser_window(cfg.kaiser_beta);
  Accumulator combined(width, height);

  auto process = [&](const WorkItem& item) {
    RowResult res;
    res.groups = find_similar_row(item.frame, item.row, cols, match_source, cfg.step2);
    res.filtered.reserve(res.groups.size());
    std::vector<double> data;
    std::vector<double> pilot;
    for (const auto& g : res.groups) {
      data.resize(g.size() * kPatchArea);
      pilot.resize(g.size() * kPatchArea);
      gather_group(noisy, g.origins, data);
      gather_group(pilot_source, g.origins, pilot);
      res.filtered.push_back(filter_group_wiener(data, pilot, cfg.sigma, cfg.step2_basis));
    }
    return res;
  };
  auto commit = [&](const RowResult& res) {
    for (std::size_t g = 0; g < res.groups.size(); ++g) {
      const auto& origins = res.groups[g].origins;
      const auto& fg = res.filtered[g];
      for (std::size_t k = 0; k < origins.size(); ++k) {
        combined.add_patch(origins[k].row, origins[k].col,
                           std::span<const double>(fg.values).subspan(k * kPatchArea, kPatchArea),
                           fg.weight, window);
      }
    }
  };
  for_each_row(work_items(noisy, cfg, cfg.step2), cfg.jobs, process, commit);
  return aggregate(combined);
}

Frame run_two_step(const FrameStack& noisy, const FrameStack& step1_match_source,
                   const EngineConfig& cfg) {
  const HardStageResult basic = hard_stage(noisy, step1_match_source, cfg);
  if (cfg.step2_match == Step2Match::kPerFrame) return wiener_stage(noisy, basic.per_frame, cfg);
  const FrameStack shared(std::vector<Frame>(noisy.size(), basic.combined));
  return wiener_stage(noisy, shared, basic.per_frame, cfg);
}

}  // namespace mfbm3d
