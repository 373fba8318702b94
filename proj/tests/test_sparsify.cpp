#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "stereolab/sparsify.hpp"

using namespace stereolab;

namespace {

Grid<float> constant_gt(int rows, int cols, float value) {
  Grid<float> gt(rows, cols);
  gt.fill(value);
  return gt;
}

std::vector<std::pair<int, int>> kept_row_runs(const SparsePointSet& set) {
  std::set<int> rows;
  for (const auto& p : set.points) rows.insert(p.row);
  std::vector<std::pair<int, int>> runs;
  int start = -2, prev = -2;
  for (int r : rows) {
    if (r != prev + 1) {
      if (start >= 0) runs.push_back({start, prev});
      start = r;
    }
    prev = r;
  }
  if (start >= 0) runs.push_back({start, prev});
  return runs;
}

}  // namespace

TEST_CASE("uniform sampling returns exactly n distinct valid pixels") {
  Grid<float> gt = constant_gt(20, 30, 12.0f);
  gt(3, 3) = kInvalid;
  gt(10, 10) = 0.0f;
  const SparsePointSet set = sample_uniform(gt, 150, 42);
  REQUIRE(set.points.size() == 150);
  std::set<std::pair<int, int>> seen;
  for (const auto& p : set.points) {
    CHECK(p.value == gt(p.row, p.col));
    CHECK(p.value > 0.0f);
    CHECK(seen.insert({p.row, p.col}).second);
  }
  CHECK_FALSE(seen.count({3, 3}));
  CHECK_FALSE(seen.count({10, 10}));
}

TEST_CASE("a fixed seed reproduces the same sample") {
  const Grid<float> gt = constant_gt(16, 16, 3.0f);
  const SparsePointSet a = sample_uniform(gt, 50, 7);
  const SparsePointSet b = sample_uniform(gt, 50, 7);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].row == b.points[i].row);
    CHECK(a.points[i].col == b.points[i].col);
  }
  const SparsePointSet c = sample_uniform(gt, 50, 8);
  bool same = true;
  for (std::size_t i = 0; i < c.points.size() && same; ++i)
    same = c.points[i].row == a.points[i].row && c.points[i].col == a.points[i].col;
  CHECK_FALSE(same);
}

TEST_CASE("requesting every valid pixel returns the whole map, more throws") {
  Grid<float> gt = constant_gt(5, 6, 2.0f);
  gt(0, 0) = kInvalid;
  const SparsePointSet all = sample_uniform(gt, 29, 1);
  CHECK(all.points.size() == 29);
  CHECK_THROWS_AS(sample_uniform(gt, 30, 1), std::domain_error);
  CHECK_THROWS_AS(sample_uniform(gt, 0, 1), std::invalid_argument);
}

TEST_CASE("sampled positions are uniform across the frame") {
  // 3x4 blocks of 10x10 pixels; chi-square over 200 fixed seeds, 11 dof.
  const Grid<float> gt = constant_gt(30, 40, 5.0f);
  std::vector<long> counts(12, 0);
  const int draws_per_seed = 60, seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    const SparsePointSet set = sample_uniform(gt, draws_per_seed, static_cast<std::uint32_t>(s));
    for (const auto& p : set.points) counts[(p.row / 10) * 4 + p.col / 10] += 1;
  }
  const double expected = static_cast<double>(draws_per_seed) * seeds / 12.0;
  double stat = 0.0;
  for (long c : counts) {
    const double d = c - expected;
    stat += d * d / expected;
  }
  CHECK(stat < 24.725);  // chi-square critical value, 11 dof, p = 0.01
}

TEST_CASE("beam band edges nest exactly across doublings") {
  const double lo = -0.62, hi = 0.55;
  const std::vector<double> e4 = beam_band_edges(4, lo, hi, 2.0);
  const std::vector<double> e8 = beam_band_edges(8, lo, hi, 2.0);
  REQUIRE(e4.size() == 5);
  REQUIRE(e8.size() == 9);
  for (int i = 0; i <= 4; ++i) CHECK(e4[i] == e8[2 * i]);
  CHECK(e4[0] == hi);
  CHECK(e4[4] == Catch::Approx(lo).margin(1e-15));
}

TEST_CASE("band centers are ground-heavy") {
  const std::vector<double> centers = beam_centers(4, -0.55, 0.55, 2.0);
  // Warp > 1 compresses bands toward theta_max; at least 3 of 4 centers
  // sit in the lower (positive-elevation) half.
  int low = 0;
  for (double c : centers)
    if (c > 0.0) ++low;
  CHECK(low >= 3);
}

TEST_CASE("beam sampling keeps one stripe per beam on a dense frame") {
  const Grid<float> gt = constant_gt(100, 8, 5.0f);
  const CameraRig rig{80.0, 0.1, 4.0, 49.5};
  const SparsePointSet set = sample_beams(gt, rig, 4);
  const auto runs = kept_row_runs(set);
  CHECK(runs.size() == 4);
  int below_mid = 0;
  for (const auto& run : runs) {
    const double center = 0.5 * (run.first + run.second);
    if (center > 49.5) ++below_mid;
  }
  CHECK(below_mid >= 3);
  for (const auto& p : set.points) CHECK(p.value == 5.0f);
}

TEST_CASE("enough beams recover every valid row") {
  Grid<float> gt = constant_gt(60, 6, 4.0f);
  for (int c = 0; c < 6; ++c) gt(17, c) = kInvalid;  // one fully-invalid row
  const CameraRig rig{70.0, 0.1, 3.0, 29.5};
  std::set<int> valid_rows;
  for (int r = 0; r < 60; ++r)
    if (r != 17) valid_rows.insert(r);

  bool saturated = false;
  for (int beams = 4; beams <= 4096 && !saturated; beams *= 2) {
    const SparsePointSet set = sample_beams(gt, rig, beams);
    std::set<int> rows;
    for (const auto& p : set.points) rows.insert(p.row);
    REQUIRE(std::includes(valid_rows.begin(), valid_rows.end(), rows.begin(), rows.end()));
    saturated = rows == valid_rows;
  }
  CHECK(saturated);
}

TEST_CASE("beam sampling handles degenerate frames") {
  Grid<float> empty(10, 5);
  empty.fill(kInvalid);
  const CameraRig rig{50.0, 0.1, 2.0, 4.5};
  CHECK(sample_beams(empty, rig, 4).points.empty());

  Grid<float> single(10, 5);
  single.fill(kInvalid);
  single(6, 1) = 8.0f;
  single(6, 3) = 9.0f;
  const SparsePointSet set = sample_beams(single, rig, 4);
  REQUIRE(set.points.size() == 2);
  CHECK(set.points[0].row == 6);
  CHECK(set.points[0].value == 8.0f);
  CHECK(set.points[1].value == 9.0f);

  CHECK_THROWS_AS(sample_beams(single, rig, 0), std::invalid_argument);
}
