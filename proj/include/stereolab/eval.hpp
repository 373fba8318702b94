#pragma once

#include <cmath>
#include <stdexcept>

#include "stereolab/grid.hpp"

namespace stereolab {

inline Mask valid_mask(const Grid<float>& gt) {
  Mask m(gt.rows(), gt.cols());
  for (int r = 0; r < gt.rows(); ++r)
    for (int c = 0; c < gt.cols(); ++c) m(r, c) = (is_valid(gt(r, c)) && gt(r, c) > 0.0f) ? 1 : 0;
  return m;
}

inline DisparityMap clip_disparity(const DisparityMap& d, float max_disparity = kDefaultMaxDisparity) {
  DisparityMap out = d;
  for (int r = 0; r < out.rows(); ++r)
    for (int c = 0; c < out.cols(); ++c)
      if (is_valid(out(r, c)))
        out(r, c) = std::min(std::max(out(r, c), 0.0f), max_disparity);
  return out;
}

namespace detail {

inline void check_metric_inputs(const Grid<float>& a, const Grid<float>& b, const Mask& mask) {
  if (!a.same_shape(b) || a.rows() != mask.rows() || a.cols() != mask.cols() ||
      a.channels() != 1 || mask.channels() != 1)
    throw std::invalid_argument("metrics: maps and mask must be single-channel and same shape");
  bool any = false;
  for (int r = 0; r < mask.rows() && !any; ++r)
    for (int c = 0; c < mask.cols() && !any; ++c)
      if (mask(r, c)) any = true;
  if (!any) throw std::domain_error("metrics: empty mask");
}

}  // namespace detail

// Percentage of masked pixels with |D - D_gt| > tau.
inline double bad_ratio(const DisparityMap& d, const DisparityMap& gt, const Mask& mask,
                        double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("bad_ratio: tau must be > 0");
  detail::check_metric_inputs(d, gt, mask);
  long bad = 0, total = 0;
  for (int r = 0; r < d.rows(); ++r)
    for (int c = 0; c < d.cols(); ++c) {
      if (!mask(r, c)) continue;
      ++total;
      if (std::abs(static_cast<double>(d(r, c)) - gt(r, c)) > tau) ++bad;
    }
  return 100.0 * static_cast<double>(bad) / static_cast<double>(total);
}

inline double avg_err(const DisparityMap& d, const DisparityMap& gt, const Mask& mask) {
  detail::check_metric_inputs(d, gt, mask);
  double acc = 0.0;
  long total = 0;
  for (int r = 0; r < d.rows(); ++r)
    for (int c = 0; c < d.cols(); ++c) {
      if (!mask(r, c)) continue;
      acc += std::abs(static_cast<double>(d(r, c)) - gt(r, c));
      ++total;
    }
  return acc / static_cast<double>(total);
}

struct DepthErrors {
  double rmse_mm = 0.0;
  double mae_mm = 0.0;
};

// Inputs in millimeters.
inline DepthErrors depth_errors(const DepthMap& z, const DepthMap& z_gt, const Mask& mask) {
  detail::check_metric_inputs(z, z_gt, mask);
  double sq = 0.0, abs_acc = 0.0;
  long total = 0;
  for (int r = 0; r < z.rows(); ++r)
    for (int c = 0; c < z.cols(); ++c) {
      if (!mask(r, c)) continue;
      const double e = static_cast<double>(z(r, c)) - z_gt(r, c);
      sq += e * e;
      abs_acc += std::abs(e);
      ++total;
    }
  return {std::sqrt(sq / static_cast<double>(total)), abs_acc / static_cast<double>(total)};
}

}  // namespace stereolab
