#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "stereolab/analysis.hpp"

using namespace stereolab;

TEST_CASE("the diagnostic pair has the documented layout") {
  const ToyPair pair = make_toy_pair();
  REQUIRE(pair.left.rows() == 40);
  REQUIRE(pair.left.channels() == 3);
  REQUIRE(pair.gt.same_shape(DisparityMap(40, 40)));

  for (int r = 0; r < 40; ++r)
    for (int c = 0; c < 40; ++c) {
      const bool fg = r >= 12 && r < 27 && c >= 12 && c < 27;
      CHECK(pair.gt(r, c) == (fg ? 15.0f : 6.0f));
    }
  // Background: red fading to blue along the row; foreground: green channel on.
  CHECK(pair.left(0, 0, 0) == 1.0f);
  CHECK(pair.left(0, 0, 2) == 0.0f);
  CHECK(pair.left(0, 39, 2) > pair.left(0, 39, 0));
  CHECK(pair.left(12, 12, 1) == 1.0f);
  CHECK(pair.left(12, 12, 2) == 0.0f);
}

TEST_CASE("right view is the left sampled at the shifted position") {
  const ToyPair pair = make_toy_pair();
  for (int c = 0; c + 6 < 40; ++c)
    for (int k = 0; k < 3; ++k) CHECK(pair.right(0, c, k) == pair.left(0, c + 6, k));
  // Foreground pixels shift by 15; columns 12..26 land on 0..11 when in frame.
  for (int r = 12; r < 27; ++r)
    for (int cl = 15; cl < 27; ++cl)
      for (int k = 0; k < 3; ++k) CHECK(pair.right(r, cl - 15, k) == pair.left(r, cl, k));
}

TEST_CASE("degenerate pair parameters are rejected") {
  CHECK_THROWS_AS(make_toy_pair(40, 40), std::invalid_argument);
  CHECK_THROWS_AS(make_toy_pair(40, 15, 6, 6), std::invalid_argument);
  CHECK_THROWS_AS(make_toy_pair(40, 15, -1, 15), std::invalid_argument);
  CHECK_THROWS_AS(make_toy_pair(40, 15, 0, 27), std::domain_error);
  CHECK_NOTHROW(make_toy_pair(40, 15, 0, 26));
}

TEST_CASE("zero shifts produce identical views and zero ground truth") {
  const ToyPair pair = make_toy_pair(30, 11, 0, 0);
  CHECK(pair.left == pair.right);
  for (int r = 0; r < 30; ++r)
    for (int c = 0; c < 30; ++c) CHECK(pair.gt(r, c) == 0.0f);
}

TEST_CASE("matched-position cost is the per-row maximum for identical views") {
  std::mt19937 rng(3);
  Image img(6, 10, 3);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 10; ++c)
      for (int k = 0; k < 3; ++k) img(r, c, k) = static_cast<float>(rng() >> 8) / 16777216.0f;
  const CostVolume vol = l1_cost_volume(img, img);
  for (int r = 0; r < 6; ++r)
    for (int w = 0; w < 10; ++w) {
      CHECK(vol(r, w, w) == 0.0f);
      for (int wp = 0; wp < 10; ++wp) CHECK(vol(r, w, wp) <= 0.0f);
    }
}

TEST_CASE("background argmax recovers the background shift") {
  const ToyPair pair = make_toy_pair();
  const CostVolume vol = l1_cost_volume(pair.left, pair.right);
  for (int w = 6; w < 40; ++w) {
    int best = 0;
    for (int wp = 1; wp < 40; ++wp)
      if (vol(0, w, wp) > vol(0, w, best)) best = wp;
    CHECK(best == w - 6);
  }
}

TEST_CASE("column subsampling keeps every stride-th column") {
  DisparityMap gt(3, 40);
  gt.fill(4.0f);
  const DisparityMap s6 = sparse_gt_disparity(gt, 6);
  for (int c = 0; c < 40; ++c) CHECK(s6(1, c) == (c % 6 == 0 ? 4.0f : 0.0f));
  CHECK(sparse_gt_disparity(gt, 1) == gt);
  const DisparityMap wide = sparse_gt_disparity(gt, 50);
  for (int c = 1; c < 40; ++c) CHECK(wide(0, c) == 0.0f);
  CHECK(wide(0, 0) == 4.0f);
  CHECK_THROWS_AS(sparse_gt_disparity(gt, 0), std::invalid_argument);
}

TEST_CASE("nonzero points collect exactly the positive pixels") {
  DisparityMap map(2, 3);
  map(0, 1) = 5.0f;
  map(1, 2) = 7.0f;
  map(1, 0) = kInvalid;
  const SparsePointSet set = nonzero_points(map);
  REQUIRE(set.points.size() == 2);
  CHECK(set.points[0].row == 0);
  CHECK(set.points[0].col == 1);
  CHECK(set.points[1].value == 7.0f);
}

TEST_CASE("roughness is zero on flat and linear fields, exact on an impulse") {
  Grid<float> flat(5, 5);
  flat.fill(3.0f);
  CHECK(laplacian_energy(flat) == 0.0);

  Grid<float> ramp(6, 7);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 7; ++c) ramp(r, c) = 0.25f * r - 1.5f * c;
  CHECK(laplacian_energy(ramp) < 1e-5);

  Grid<float> impulse(5, 5);
  impulse(2, 2) = 1.0f;
  CHECK(laplacian_energy(impulse) == Catch::Approx(8.0 / 9.0).epsilon(1e-12));

  CHECK(laplacian_energy(Grid<float>(2, 8)) == 0.0);
}

TEST_CASE("spectra isolate DC and Nyquist and satisfy Parseval") {
  const std::vector<float> dc(8, 2.5f);
  const std::vector<double> mag_dc = spectrum_1d(dc);
  CHECK(mag_dc[0] == Catch::Approx(20.0).margin(1e-9));
  for (std::size_t k = 1; k < 8; ++k) CHECK(mag_dc[k] < 1e-9);

  std::vector<float> alt(8);
  for (std::size_t i = 0; i < 8; ++i) alt[i] = i % 2 == 0 ? 1.0f : -1.0f;
  const std::vector<double> mag_alt = spectrum_1d(alt);
  CHECK(mag_alt[4] == Catch::Approx(8.0).margin(1e-9));
  for (std::size_t k = 0; k < 8; ++k)
    if (k != 4) CHECK(mag_alt[k] < 1e-9);

  std::mt19937 rng(7);
  std::vector<float> sig(13);
  for (auto& v : sig) v = static_cast<float>(rng() >> 8) / 16777216.0f - 0.5f;
  const std::vector<double> mag = spectrum_1d(sig);
  double lhs = 0.0, rhs = 0.0;
  for (double m : mag) lhs += m * m;
  for (float v : sig) rhs += static_cast<double>(v) * v;
  CHECK(lhs == Catch::Approx(13.0 * rhs).epsilon(1e-9));

  CHECK_THROWS_AS(spectrum_1d(std::vector<float>(1, 1.0f)), std::invalid_argument);
}

TEST_CASE("the scanline box filter has unit DC gain") {
  Grid<float> flat(3, 9, 2);
  flat.fill(0.7f);
  CHECK(lowpass(flat, 2) == flat);

  Grid<float> impulse(1, 11);
  impulse(0, 5) = 1.0f;
  const Grid<float> box = lowpass(impulse, 2);
  for (int c = 0; c < 11; ++c)
    CHECK(box(0, c) == (std::abs(c - 5) <= 2 ? 0.2f : 0.0f));

  std::mt19937 rng(9);
  Grid<float> sig(4, 15);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 15; ++c) sig(r, c) = static_cast<float>(rng() >> 8) / 16777216.0f;
  const Grid<float> smooth = lowpass(sig, 3);
  double before = 0.0, after = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 15; ++c) {
      before += sig(r, c);
      after += smooth(r, c);
    }
  CHECK(after == Catch::Approx(before).epsilon(1e-6));  // per-pixel float casts
  CHECK_THROWS_AS(lowpass(sig, 0), std::invalid_argument);
}

TEST_CASE("slab distance is a norm") {
  Grid<float> a(3, 4, 2), b(3, 4, 2), c(3, 4, 2);
  std::mt19937 rng(11);
  for (auto* g : {&a, &b, &c})
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 4; ++col)
        for (int k = 0; k < 2; ++k)
          (*g)(r, col, k) = static_cast<float>(rng() >> 8) / 16777216.0f;
  CHECK(retrieval_error(a, a) == 0.0);
  CHECK(retrieval_error(a, b) == Catch::Approx(retrieval_error(b, a)));
  CHECK(retrieval_error(a, c) <= retrieval_error(a, b) + retrieval_error(b, c) + 1e-12);
  CHECK_THROWS_AS(retrieval_error(a, Grid<float>(3, 5, 2)), std::invalid_argument);

  Grid<float> biased = a;
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 4; ++col)
      for (int k = 0; k < 2; ++k) biased(r, col, k) += 0.5f;
  CHECK(retrieval_error(biased, a) == Catch::Approx(std::sqrt(24.0 * 0.25)).epsilon(1e-6));
}

TEST_CASE("sparse guidance roughens the slab and nearest fill restores it") {
  const ToyStudy study = run_toy_study(make_toy_pair());
  CHECK(study.lap_sparse > 1.5 * study.lap_full);
  CHECK(study.lap_filled <= study.lap_sparse - 0.5 * (study.lap_sparse - study.lap_full));
  CHECK(study.lap_filled < study.lap_zero);

  CHECK(study.e_filled < study.e_sparse);
  CHECK(study.e_sparse < study.e_zero);
  CHECK(study.e_lp_filled < study.e_lp_sparse);
  CHECK(study.e_lp_sparse < study.e_lp_zero);
  CHECK(study.e_lp_filled < study.e_filled);
}
