#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "stereolab/cost_volume.hpp"
#include "stereolab/filters.hpp"
#include "stereolab/grid.hpp"
#include "stereolab/parallel.hpp"

namespace stereolab {

struct InitResult {
  DisparityMap map;
  int rejected = 0;  // guidance points outside the frame or non-finite
};

// Zero map unless guidance / a prefilled map say otherwise. Prefilled pixels
// win over point guidance. Everything is clipped to [0, max_disparity].
inline InitResult init_disparity(int rows, int cols, const SparsePointSet* guidance = nullptr,
                                 const DisparityMap* prefilled = nullptr,
                                 float max_disparity = kDefaultMaxDisparity) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("init_disparity: empty shape");
  InitResult res{DisparityMap(rows, cols), 0};
  if (guidance) {
    for (const auto& p : guidance->points) {
      if (p.row < 0 || p.row >= rows || p.col < 0 || p.col >= cols || !is_valid(p.value)) {
        ++res.rejected;
        continue;
      }
      res.map(p.row, p.col) = p.value;
    }
  }
  if (prefilled) {
    if (prefilled->rows() != rows || prefilled->cols() != cols)
      throw std::invalid_argument("init_disparity: prefilled shape mismatch");
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (is_valid((*prefilled)(r, c))) res.map(r, c) = (*prefilled)(r, c);
  }
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      res.map(r, c) = std::min(std::max(res.map(r, c), 0.0f), max_disparity);
  return res;
}

struct StepResult {
  DisparityMap next;
  Grid<float> residual;  // after smoothing; next = clip(D + residual)
};

// One retrieval-and-update round: score candidate disparities D+k for
// k in [-K, K] through the disparity-indexed view, take the argmax (ties
// break toward k = 0, then the negative offset), refine sub-pixel with a
// parabola through the winner's neighbors, median-smooth the residual field,
// add, clip.
inline StepResult refine_step(const CostVolume& vol, const DisparityMap& disp, int radius,
                              int smooth_radius = 1,
                              float max_disparity = kDefaultMaxDisparity) {
  if (radius < 1) throw std::invalid_argument("refine_step: radius must be >= 1");
  if (smooth_radius < 0) throw std::invalid_argument("refine_step: smooth_radius must be >= 0");
  if (disp.rows() != vol.rows() || disp.cols() != vol.cols())
    throw std::invalid_argument("refine_step: disparity shape must match the volume");

  const int rows = disp.rows(), cols = disp.cols();
  DisparityView view(vol);
  Grid<float> raw(rows, cols);
  parallel_rows(rows, [&](int r0, int r1) {
    std::vector<float> s(static_cast<std::size_t>(2 * radius + 1));
    for (int r = r0; r < r1; ++r)
      for (int c = 0; c < cols; ++c) {
        const float d = disp(r, c);
        for (int k = -radius; k <= radius; ++k)
          s[static_cast<std::size_t>(k + radius)] = view.at(r, c, d + static_cast<float>(k));
        int best = 0;
        for (int m = 1; m <= radius; ++m) {
          if (s[static_cast<std::size_t>(-m + radius)] > s[static_cast<std::size_t>(best + radius)]) best = -m;
          if (s[static_cast<std::size_t>(m + radius)] > s[static_cast<std::size_t>(best + radius)]) best = m;
        }
        float delta = 0.0f;
        if (best > -radius && best < radius) {
          const float sm = s[static_cast<std::size_t>(best - 1 + radius)];
          const float s0 = s[static_cast<std::size_t>(best + radius)];
          const float sp = s[static_cast<std::size_t>(best + 1 + radius)];
          const float denom = sm + sp - 2.0f * s0;
          if (denom < -1e-12f) {
            delta = 0.5f * (sm - sp) / denom;
            delta = std::min(std::max(delta, -0.5f), 0.5f);
          }
        }
        raw(r, c) = static_cast<float>(best) + delta;
      }
  });

  StepResult res{DisparityMap(rows, cols), median_filter(raw, smooth_radius)};
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      res.next(r, c) =
          std::min(std::max(disp(r, c) + res.residual(r, c), 0.0f), max_disparity);
  return res;
}

struct RefineTrace {
  std::vector<DisparityMap> snapshots;       // D^(1) .. D^(T)
  std::vector<double> mean_abs_residual;     // one entry per step
};

inline RefineTrace run_refiner(const CostVolume& vol, const DisparityMap& init, int iterations,
                               int radius, int smooth_radius = 1,
                               float max_disparity = kDefaultMaxDisparity) {
  if (iterations < 1) throw std::invalid_argument("run_refiner: iterations must be >= 1");
  RefineTrace trace;
  trace.snapshots.reserve(static_cast<std::size_t>(iterations));
  DisparityMap current = init;
  for (int t = 0; t < iterations; ++t) {
    StepResult step = refine_step(vol, current, radius, smooth_radius, max_disparity);
    double acc = 0.0;
    for (int r = 0; r < step.residual.rows(); ++r)
      for (int c = 0; c < step.residual.cols(); ++c) acc += std::abs(step.residual(r, c));
    trace.mean_abs_residual.push_back(acc / (step.residual.rows() * step.residual.cols()));
    current = std::move(step.next);
    trace.snapshots.push_back(current);
  }
  return trace;
}

}  // namespace stereolab
