#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "stereolab/geometry.hpp"
#include "stereolab/grid.hpp"

namespace stereolab {

namespace detail {

// Unbiased bounded draw via rejection; avoids std::uniform_int_distribution,
// whose output is implementation-defined.
inline std::uint32_t bounded_uint(std::mt19937& rng, std::uint32_t bound) {
  const std::uint32_t limit = 0xffffffffu - 0xffffffffu % bound;
  std::uint32_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace detail

// Exactly n distinct valid pixels, uniform without replacement, reproducible
// from the seed alone. Output is row-major sorted.
inline SparsePointSet sample_uniform(const Grid<float>& gt, int n, std::uint32_t seed,
                                     ValueUnit unit = ValueUnit::Pixels) {
  if (n < 1) throw std::invalid_argument("sample_uniform: n must be >= 1");
  std::vector<int> valid;
  for (int r = 0; r < gt.rows(); ++r)
    for (int c = 0; c < gt.cols(); ++c)
      if (is_valid(gt(r, c)) && gt(r, c) > 0.0f) valid.push_back(r * gt.cols() + c);
  if (static_cast<std::size_t>(n) > valid.size())
    throw std::domain_error("sample_uniform: requested " + std::to_string(n) +
                            " points but only " + std::to_string(valid.size()) +
                            " pixels are valid");

  std::mt19937 rng(seed);
  for (int i = 0; i < n; ++i) {
    const std::uint32_t j =
        static_cast<std::uint32_t>(i) +
        detail::bounded_uint(rng, static_cast<std::uint32_t>(valid.size() - i));
    std::swap(valid[static_cast<std::size_t>(i)], valid[j]);
  }
  valid.resize(static_cast<std::size_t>(n));
  std::sort(valid.begin(), valid.end());

  SparsePointSet set;
  set.rows = gt.rows();
  set.cols = gt.cols();
  set.unit = unit;
  for (int idx : valid) {
    const int r = idx / gt.cols(), c = idx % gt.cols();
    set.points.push_back({r, c, gt(r, c), 1.0f});
  }
  return set;
}

struct BeamParams {
  double warp = 2.0;           // exponent pulling band edges toward the ground
  double tolerance_deg = 0.05; // extra rows kept around each band center
};

// Band edges in elevation, edges[0] = theta_max (ground) down to
// edges[beams] = theta_min. Doubling the beam count keeps every existing edge.
inline std::vector<double> beam_band_edges(int beams, double theta_min, double theta_max,
                                           double warp) {
  if (beams < 1) throw std::invalid_argument("beam_band_edges: beams must be >= 1");
  std::vector<double> edges(static_cast<std::size_t>(beams) + 1);
  const double range = theta_max - theta_min;
  for (int i = 0; i <= beams; ++i)
    edges[static_cast<std::size_t>(i)] =
        theta_max - range * std::pow(static_cast<double>(i) / beams, warp);
  return edges;
}

inline std::vector<double> beam_centers(int beams, double theta_min, double theta_max,
                                        double warp) {
  std::vector<double> centers(static_cast<std::size_t>(beams));
  const double range = theta_max - theta_min;
  for (int i = 0; i < beams; ++i)
    centers[static_cast<std::size_t>(i)] =
        theta_max - range * std::pow((i + 0.5) / beams, warp);
  return centers;
}

// Reduced-beam LiDAR synthesis. Rows are binned by elevation into bands that
// get denser toward the ground; each band keeps its row closest to the band
// center plus any row within the tolerance.
inline SparsePointSet sample_beams(const Grid<float>& gt, const CameraRig& rig, int beams,
                                   const BeamParams& params = {},
                                   ValueUnit unit = ValueUnit::Meters) {
  if (beams < 1) throw std::invalid_argument("sample_beams: beams must be >= 1");
  validate(rig);

  SparsePointSet set;
  set.rows = gt.rows();
  set.cols = gt.cols();
  set.unit = unit;

  std::vector<char> row_has_valid(static_cast<std::size_t>(gt.rows()), 0);
  for (int r = 0; r < gt.rows(); ++r)
    for (int c = 0; c < gt.cols(); ++c)
      if (is_valid(gt(r, c)) && gt(r, c) > 0.0f) {
        row_has_valid[static_cast<std::size_t>(r)] = 1;
        break;
      }

  std::vector<double> theta(static_cast<std::size_t>(gt.rows()));
  double theta_min = 0.0, theta_max = 0.0;
  bool any = false;
  for (int r = 0; r < gt.rows(); ++r) {
    theta[static_cast<std::size_t>(r)] = std::atan((r - rig.cy) / rig.focal_px);
    if (!row_has_valid[static_cast<std::size_t>(r)]) continue;
    if (!any || theta[static_cast<std::size_t>(r)] < theta_min)
      theta_min = theta[static_cast<std::size_t>(r)];
    if (!any || theta[static_cast<std::size_t>(r)] > theta_max)
      theta_max = theta[static_cast<std::size_t>(r)];
    any = true;
  }
  if (!any) return set;

  const double range = theta_max - theta_min;
  std::vector<char> keep(static_cast<std::size_t>(gt.rows()), 0);
  if (range <= 0.0) {
    for (int r = 0; r < gt.rows(); ++r)
      if (row_has_valid[static_cast<std::size_t>(r)]) keep[static_cast<std::size_t>(r)] = 1;
  } else {
    const std::vector<double> centers = beam_centers(beams, theta_min, theta_max, params.warp);
    const double tol = params.tolerance_deg * std::numbers::pi / 180.0;
    std::vector<int> nearest(static_cast<std::size_t>(beams), -1);
    for (int r = 0; r < gt.rows(); ++r) {
      if (!row_has_valid[static_cast<std::size_t>(r)]) continue;
      const double t = theta[static_cast<std::size_t>(r)];
      if (t < theta_min || t > theta_max) continue;
      const double u = std::pow((theta_max - t) / range, 1.0 / params.warp);
      const int band = clampi(static_cast<int>(u * beams), 0, beams - 1);
      const double dist = std::abs(t - centers[static_cast<std::size_t>(band)]);
      if (dist <= tol) keep[static_cast<std::size_t>(r)] = 1;
      int& best = nearest[static_cast<std::size_t>(band)];
      if (best < 0 || dist < std::abs(theta[static_cast<std::size_t>(best)] -
                                      centers[static_cast<std::size_t>(band)]))
        best = r;
    }
    for (int b = 0; b < beams; ++b)
      if (nearest[static_cast<std::size_t>(b)] >= 0)
        keep[static_cast<std::size_t>(nearest[static_cast<std::size_t>(b)])] = 1;
  }

  for (int r = 0; r < gt.rows(); ++r) {
    if (!keep[static_cast<std::size_t>(r)]) continue;
    for (int c = 0; c < gt.cols(); ++c)
      if (is_valid(gt(r, c)) && gt(r, c) > 0.0f) set.points.push_back({r, c, gt(r, c), 1.0f});
  }
  return set;
}

}  // namespace stereolab
