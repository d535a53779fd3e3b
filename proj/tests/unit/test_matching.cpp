#include <gtest/gtest.h>

#include <random>

#include "mfbm3d/matching.hpp"
#include "oracles.hpp"

using namespace mfbm3d;

namespace {

FrameStack random_stack(int w, int h, int frames, std::uint64_t seed, int levels) {
  std::vector<Frame> fs;
  for (int f = 0; f < frames; ++f) fs.push_back(oracle::random_integer_frame(w, h, seed * 31 + f, levels));
  return FrameStack(std::move(fs));
}

void expect_same(const MatchedGroup& got, const std::vector<oracle::Match>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(got.origins[i].frame, want[i].frame) << "rank " << i;
    EXPECT_EQ(got.origins[i].row, want[i].row) << "rank " << i;
    EXPECT_EQ(got.origins[i].col, want[i].col) << "rank " << i;
    EXPECT_DOUBLE_EQ(got.distances[i], want[i].dist) << "rank " << i;
  }
}

}  // namespace

TEST(PatchDistance, Examples) {
  std::vector<double> a(64, 0.0), b(64, 1.0);
  EXPECT_EQ(patch_distance(a, a), 0.0);
  EXPECT_EQ(patch_distance(a, b), 1.0);
  std::vector<double> c(63);
  EXPECT_THROW(patch_distance(a, c), std::invalid_argument);
}

TEST(PatchDistance, MatchesDirectSummation) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(64), b(64);
    double s = 0.0;
    for (int i = 0; i < 64; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    EXPECT_NEAR(patch_distance(a, b), s / 64.0, 1e-12);
  }
  const Frame f = oracle::random_frame(20, 20, 3), g = oracle::random_frame(20, 20, 4);
  EXPECT_NEAR(patch_distance(f, 2, 5, g, 7, 1), oracle::distance(f, 2, 5, g, 7, 1), 1e-10);
}

TEST(ReferencePositions, SixteenWithStrideThree) {
  EXPECT_EQ(reference_positions(16, 3), (std::vector<int>{0, 3, 6, 8}));
  const FrameStack one({Frame(16, 16)});
  EXPECT_EQ(enumerate_references(one, 3, FrameScope::all()).size(), 16u);
}

TEST(ReferencePositions, StrideLargerThanFrameGivesCorners) {
  const FrameStack s({Frame(20, 16)});
  const auto refs = enumerate_references(s, 100, FrameScope::all());
  ASSERT_EQ(refs.size(), 4u);
  EXPECT_EQ(refs[0], (PatchOrigin{0, 0, 0}));
  EXPECT_EQ(refs[1], (PatchOrigin{0, 0, 12}));
  EXPECT_EQ(refs[2], (PatchOrigin{0, 8, 0}));
  EXPECT_EQ(refs[3], (PatchOrigin{0, 8, 12}));
}

TEST(ReferencePositions, ScopeMultiplicity) {
  const FrameStack s(std::vector<Frame>(5, Frame(32, 24)));
  const auto per = enumerate_references(s, 3, FrameScope::single(2));
  const auto all = enumerate_references(s, 3, FrameScope::all());
  EXPECT_EQ(all.size(), 5 * per.size());
  for (const auto& o : per) EXPECT_EQ(o.frame, 2);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
}

TEST(SearchConfig, Validation) {
  SearchConfig c;
  EXPECT_NO_THROW(c.validate());
  c.stride = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SearchConfig{};
  c.max_group = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SearchConfig{};
  c.search_radius = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(FindSimilar, ConstantStackUsesTieBreakOrder) {
  const FrameStack s(std::vector<Frame>(5, Frame(32, 32, 7.0)));
  SearchConfig cfg;
  cfg.max_group = 16;
  cfg.frame_scope = FrameScope::all();
  const PatchOrigin ref{2, 10, 10};
  const auto g = find_similar(ref, s, cfg);
  ASSERT_EQ(g.size(), 16u);
  EXPECT_EQ(g.origins[0], ref);
  // All distances tie at zero: the rest are the lexicographically smallest
  // origins, starting with frame 0 at its top-left.
  std::vector<oracle::Match> want = oracle::brute_force_match(s.frames(), 2, 10, 10, 19, {0, 1, 2, 3, 4}, 16);
  expect_same(g, want);
  EXPECT_EQ(g.origins[1], (PatchOrigin{0, 0, 0}));
  EXPECT_EQ(g.origins[2], (PatchOrigin{0, 0, 1}));
}

TEST(FindSimilar, PlantedDuplicateRanksSecond) {
  FrameStack s = random_stack(32, 32, 5, 77, 256);
  const PatchOrigin ref{0, 12, 9};
  // Copy the reference patch into frame 3 at another position.
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) s[3](4 + i, 15 + j) = s[0](12 + i, 9 + j);
  SearchConfig cfg;
  const auto g = find_similar(ref, s, cfg);
  EXPECT_EQ(g.origins[0], ref);
  EXPECT_EQ(g.origins[1], (PatchOrigin{3, 4, 15}));
  EXPECT_EQ(g.distances[1], 0.0);
}

// Property: equality with exhaustive search on 100 random 32x32 instances,
// across scopes, radii, strides and group sizes.
TEST(FindSimilar, EqualsBruteForceOnHundredInstances) {
  std::mt19937_64 rng(2024);
  for (int inst = 0; inst < 100; ++inst) {
    const int frames = 1 + static_cast<int>(rng() % 4);
    // Few gray levels force many exact distance ties.
    const int levels = inst % 3 == 0 ? 2 : 16;
    const FrameStack s = random_stack(32, 32, frames, 1000 + inst, levels);
    SearchConfig cfg;
    cfg.search_radius = static_cast<int>(rng() % 12);
    cfg.max_group = 1 + static_cast<int>(rng() % 40);
    const int ref_frame = static_cast<int>(rng() % frames);
    const bool all = rng() % 2 == 0;
    cfg.frame_scope = all ? FrameScope::all() : FrameScope::single(ref_frame);
    std::vector<int> scope_frames;
    for (int f = 0; f < frames; ++f)
      if (all || f == ref_frame) scope_frames.push_back(f);

    const auto cols = reference_positions(32, 1 + static_cast<int>(rng() % 5));
    const int row = static_cast<int>(rng() % 25);
    const auto batch = find_similar_row(ref_frame, row, cols, s, cfg);
    ASSERT_EQ(batch.size(), cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto want = oracle::brute_force_match(s.frames(), ref_frame, row, cols[k], cfg.search_radius,
                                                  scope_frames, cfg.max_group);
      SCOPED_TRACE("instance " + std::to_string(inst) + " col " + std::to_string(cols[k]));
      expect_same(batch[k], want);
      expect_same(find_similar({ref_frame, row, cols[k]}, s, cfg), want);
    }
  }
}

TEST(FindSimilar, DistancesNonDecreasingAfterReference) {
  const FrameStack s = random_stack(48, 40, 3, 5, 256);
  SearchConfig cfg;
  cfg.max_group = 32;
  for (const auto& ref : enumerate_references(s, 7, FrameScope::all())) {
    const auto g = find_similar(ref, s, cfg);
    EXPECT_TRUE(is_power_of_two(g.size()));
    EXPECT_LE(g.size(), 32u);
    for (std::size_t i = 2; i < g.size(); ++i) EXPECT_LE(g.distances[i - 1], g.distances[i]);
  }
}

TEST(FindSimilar, SingleScopeStaysInFrame) {
  const FrameStack s = random_stack(32, 32, 4, 9, 256);
  SearchConfig cfg;
  cfg.frame_scope = FrameScope::single(2);
  const auto g = find_similar({2, 5, 5}, s, cfg);
  for (const auto& o : g.origins) EXPECT_EQ(o.frame, 2);
}

// With a stride no larger than the patch, every pixel lies in some reference
// patch; with any stride the last row and column are reached, so the
// corners are.
TEST(EnumerateReferences, CoverPixels) {
  for (int w : {16, 17, 23, 40})
    for (int stride : {1, 3, 5, 8, 9, 50}) {
      const FrameStack s({Frame(w, 19)});
      Frame covered(w, 19, 0.0);
      for (const auto& o : enumerate_references(s, stride, FrameScope::all()))
        for (int i = 0; i < 8; ++i)
          for (int j = 0; j < 8; ++j) covered(o.row + i, o.col + j) = 1.0;
      for (int r = 0; r < 19; ++r)
        for (int c = 0; c < w; ++c) {
          const bool corner = (r == 0 || r == 18) && (c == 0 || c == w - 1);
          if (stride <= 8 || corner) EXPECT_EQ(covered(r, c), 1.0) << "w " << w << " stride " << stride;
        }
    }
}

TEST(GatherGroup, CopiesPatchesInOrder) {
  const FrameStack s = random_stack(20, 20, 2, 3, 256);
  const std::vector<PatchOrigin> origins{{1, 2, 3}, {0, 0, 0}};
  std::vector<double> buf(128);
  gather_group(s, origins, buf);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      EXPECT_EQ(buf[i * 8 + j], s[1](2 + i, 3 + j));
      EXPECT_EQ(buf[64 + i * 8 + j], s[0](i, j));
    }
}
