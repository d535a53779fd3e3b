#include "mfbm3d/matching.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mfbm3d {

std::vector<int> FrameScope::frames(std::size_t count) const {
  std::vector<int> out;
  if (is_all()) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(static_cast<int>(i));
  } else {
    if (frame_ >= static_cast<int>(count))
      throw std::invalid_argument("frame scope " + std::to_string(frame_) +
                                  " outside stack of " + std::to_string(count));
    out.push_back(frame_);
  }
  return out;
}

void SearchConfig::validate() const {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  if (max_group < 1) throw std::invalid_argument("max_group must be >= 1");
  if (search_radius < 0) throw std::invalid_argument("search_radius must be >= 0");
}

double patch_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("patch_distance: size mismatch");
  if (a.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

// Column sums first, then across columns: the same association order as the
// row matcher, so both give bit-identical distances.
double patch_distance(const Frame& a, int a_row, int a_col, const Frame& b, int b_row, int b_col) {
  double sum = 0.0;
  for (int j = 0; j < kPatchSize; ++j) {
    double e = 0.0;
    for (int i = 0; i < kPatchSize; ++i) {
      const double d = a(a_row + i, a_col + j) - b(b_row + i, b_col + j);
      e += d * d;
    }
    sum += e;
  }
  return sum / kPatchArea;
}

std::vector<int> reference_positions(int extent, int stride) {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const int last = extent - kPatchSize;
  if (last < 0) throw std::invalid_argument("frame smaller than a patch");
  std::vector<int> pos;
  for (int p = 0; p <= last; p += stride) pos.push_back(p);
  if (pos.back() != last) pos.push_back(last);
  return pos;
}

std::vector<PatchOrigin> enumerate_references(const FrameStack& stack, int stride,
                                              FrameScope ref_scope) {
  const auto rows = reference_positions(stack.height(), stride);
  const auto cols = reference_positions(stack.width(), stride);
  std::vector<PatchOrigin> out;
  for (int f : ref_scope.frames(stack.size())) {
    for (int r : rows)
      for (int c : cols) out.push_back({f, r, c});
  }
  return out;
}

namespace {

struct Candidate {
  double dist;
  PatchOrigin at;

  friend bool operator<(const Candidate& x, const Candidate& y) noexcept {
    if (x.dist != y.dist) return x.dist < y.dist;
    return x.at < y.at;
  }
};

// Bounded max-heap keeping the `capacity` smallest candidates.
class TopK {
 public:
  explicit TopK(std::size_t capacity) : capacity_(capacity) { heap_.reserve(capacity); }

  void offer(const Candidate& c) {
    if (capacity_ == 0) return;
    if (heap_.size() < capacity_) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end());
    } else if (c < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end());
    }
  }

  std::vector<Candidate> sorted() && {
    std::sort_heap(heap_.begin(), heap_.end());
    return std::move(heap_);
  }

 private:
  std::size_t capacity_;
  std::vector<Candidate> heap_;
};

}  // namespace

std::vector<MatchedGroup> find_similar_row(int ref_frame, int ref_row, std::span<const int> ref_cols,
                                           const FrameStack& stack, const SearchConfig& cfg) {
  cfg.validate();
  const int height = stack.height();
  const int width = stack.width();
  const int radius = cfg.search_radius;
  const int last_row = height - kPatchSize;
  const int last_col = width - kPatchSize;
  if (ref_frame < 0 || ref_frame >= static_cast<int>(stack.size()) || ref_row < 0 ||
      ref_row > last_row)
    throw std::invalid_argument("find_similar_row: reference row outside the stack");
  for (int c : ref_cols)
    if (c < 0 || c > last_col) throw std::invalid_argument("find_similar_row: reference column outside the frame");

  const std::size_t nrefs = ref_cols.size();
  std::vector<TopK> best(nrefs, TopK(static_cast<std::size_t>(cfg.max_group - 1)));
  if (nrefs == 0) return {};

  const Frame& ref = stack[ref_frame];
  const int col_lo = *std::min_element(ref_cols.begin(), ref_cols.end());
  const int col_hi = *std::max_element(ref_cols.begin(), ref_cols.end());
  std::vector<double> colsum(static_cast<std::size_t>(width), 0.0);
  std::vector<std::size_t> active;
  active.reserve(nrefs);

  for (int m : cfg.frame_scope.frames(stack.size())) {
    const Frame& cand = stack[m];
    for (int q = std::max(0, ref_row - radius); q <= std::min(last_row, ref_row + radius); ++q) {
      for (int dx = -radius; dx <= radius; ++dx) {
        active.clear();
        for (std::size_t k = 0; k < nrefs; ++k) {
          const int c = ref_cols[k] + dx;
          if (c >= 0 && c <= last_col) active.push_back(k);
        }
        if (active.empty()) continue;
        const int x0 = std::max(col_lo, -dx);
        const int x1 = std::min(col_hi, last_col - dx) + kPatchSize;  // exclusive
        double* e = colsum.data();
        for (int x = x0; x < x1; ++x) e[x] = 0.0;
        for (int i = 0; i < kPatchSize; ++i) {
          const double* a = ref.row_ptr(ref_row + i);
          const double* b = cand.row_ptr(q + i);
          for (int x = x0; x < x1; ++x) {
            const double d = a[x] - b[x + dx];
            e[x] += d * d;
          }
        }
        for (std::size_t k : active) {
          const int c = ref_cols[k];
          if (m == ref_frame && q == ref_row && dx == 0) continue;
          double sum = 0.0;
          for (int j = 0; j < kPatchSize; ++j) sum += e[c + j];
          best[k].offer({sum / kPatchArea, {m, q, c + dx}});
        }
      }
    }
  }

  std::vector<MatchedGroup> out(nrefs);
  for (std::size_t k = 0; k < nrefs; ++k) {
    auto ranked = std::move(best[k]).sorted();
    const std::size_t count =
        floor_power_of_two(std::min<std::size_t>(cfg.max_group, ranked.size() + 1));
    MatchedGroup& g = out[k];
    g.origins.reserve(count);
    g.distances.reserve(count);
    g.origins.push_back({ref_frame, ref_row, ref_cols[k]});
    g.distances.push_back(0.0);
    for (std::size_t i = 0; i + 1 < count; ++i) {
      g.origins.push_back(ranked[i].at);
      g.distances.push_back(ranked[i].dist);
    }
  }
  return out;
}

MatchedGroup find_similar(const PatchOrigin& ref, const FrameStack& stack, const SearchConfig& cfg) {
  const int col = ref.col;
  auto groups = find_similar_row(ref.frame, ref.row, std::span<const int>(&col, 1), stack, cfg);
  return std::move(groups.front());
}

void gather_group(const FrameStack& stack, std::span<const PatchOrigin> origins,
                  std::span<double> out) {
  if (out.size() != origins.size() * kPatchArea)
    throw std::invalid_argument("gather_group: output buffer has the wrong size");
  double* dst = out.data();
  for (const auto& o : origins) {
    const Frame& f = stack[static_cast<std::size_t>(o.frame)];
    for (int i = 0; i < kPatchSize; ++i) {
      const double* src = f.row_ptr(o.row + i) + o.col;
      std::copy(src, src + kPatchSize, dst);
      dst += kPatchSize;
    }
  }
}

}  // namespace mfbm3d
