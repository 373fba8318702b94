#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "stereolab/cost_volume.hpp"
#include "stereolab/filters.hpp"
#include "stereolab/grid.hpp"
#include "stereolab/parallel.hpp"
#include "stereolab/prefill.hpp"

namespace stereolab {

struct ToyPair {
  Image left;
  Image right;
  DisparityMap gt;
};

// 40x40-style diagnostic pair: red->blue background gradient shifted by d_bg,
// a green->orange centered square shifted by d_fg. The gradient is defined on
// an extended domain so both views sample it in range; the square may leave
// the right frame partially (it does at the default shifts) but not entirely.
inline ToyPair make_toy_pair(int size = 40, int fg_size = 15, int d_bg = 6, int d_fg = 15) {
  if (size < 2 || fg_size < 1 || fg_size >= size)
    throw std::invalid_argument("make_toy_pair: need 1 <= fg_size < size, size >= 2");
  if (d_bg < 0 || (d_fg <= d_bg && !(d_fg == 0 && d_bg == 0)))
    throw std::invalid_argument("make_toy_pair: need d_fg > d_bg >= 0 (or both zero)");
  const int c0 = (size - fg_size) / 2;
  if (c0 + fg_size - d_fg <= 0)
    throw std::domain_error("make_toy_pair: foreground shifted fully out of frame");

  const auto bg = [&](int r, int x, float* rgb) {
    (void)r;
    const float t = static_cast<float>(x) / static_cast<float>(size - 1 + d_bg);
    rgb[0] = 1.0f - t;  // red -> blue
    rgb[1] = 0.0f;
    rgb[2] = t;
  };
  const auto fg = [&](int j, float* rgb) {
    const float t = fg_size > 1 ? static_cast<float>(j) / static_cast<float>(fg_size - 1) : 0.0f;
    rgb[0] = t;  // green -> orange
    rgb[1] = 1.0f - 0.5f * t;
    rgb[2] = 0.0f;
  };

  ToyPair pair{Image(size, size, 3), Image(size, size, 3), DisparityMap(size, size)};
  float rgb[3];
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      bg(r, c, rgb);
      for (int k = 0; k < 3; ++k) pair.left(r, c, k) = rgb[k];
      bg(r, c + d_bg, rgb);
      for (int k = 0; k < 3; ++k) pair.right(r, c, k) = rgb[k];
      pair.gt(r, c) = static_cast<float>(d_bg);
    }
  for (int r = c0; r < c0 + fg_size; ++r)
    for (int j = 0; j < fg_size; ++j) {
      fg(j, rgb);
      const int cl = c0 + j;
      for (int k = 0; k < 3; ++k) pair.left(r, cl, k) = rgb[k];
      pair.gt(r, cl) = static_cast<float>(d_fg);
      const int cr = cl - d_fg;
      if (cr >= 0 && cr < size)
        for (int k = 0; k < 3; ++k) pair.right(r, cr, k) = rgb[k];
    }
  return pair;
}

// C(h, w, w') = -sum_c |left(h,w,c) - right(h,w',c)|; negated so higher is
// better, like the correlation volume.
inline CostVolume l1_cost_volume(const Image& left, const Image& right) {
  if (!left.same_shape(right)) throw std::invalid_argument("l1_cost_volume: shape mismatch");
  const int rows = left.rows(), cols = left.cols(), ch = left.channels();
  CostVolume vol(rows, cols, cols);
  parallel_rows(rows, [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r)
      for (int w = 0; w < cols; ++w)
        for (int wp = 0; wp < cols; ++wp) {
          float acc = 0.0f;
          for (int k = 0; k < ch; ++k) acc += std::abs(left(r, w, k) - right(r, wp, k));
          vol(r, w, wp) = -acc;
        }
  });
  return vol;
}

// Keeps gt at columns divisible by stride, zero elsewhere.
inline DisparityMap sparse_gt_disparity(const DisparityMap& gt, int stride) {
  if (stride < 1) throw std::invalid_argument("sparse_gt_disparity: stride must be >= 1");
  DisparityMap out(gt.rows(), gt.cols());
  for (int r = 0; r < gt.rows(); ++r)
    for (int c = 0; c < gt.cols(); c += stride) out(r, c) = gt(r, c);
  return out;
}

// Mean absolute 5-point Laplacian response over interior samples, averaged
// across channels.
inline double laplacian_energy(const Grid<float>& s) {
  if (s.rows() < 3 || s.cols() < 3) return 0.0;
  double acc = 0.0;
  long count = 0;
  for (int k = 0; k < s.channels(); ++k)
    for (int r = 1; r + 1 < s.rows(); ++r)
      for (int c = 1; c + 1 < s.cols(); ++c) {
        const double v = static_cast<double>(s(r - 1, c, k)) + s(r + 1, c, k) + s(r, c - 1, k) +
                         s(r, c + 1, k) - 4.0 * s(r, c, k);
        acc += std::abs(v);
        ++count;
      }
  return acc / static_cast<double>(count);
}

// Magnitude of the DFT, DC first. Direct evaluation; diagnostics-sized inputs.
inline std::vector<double> spectrum_1d(const std::vector<float>& signal) {
  const std::size_t n = signal.size();
  if (n < 2) throw std::invalid_argument("spectrum_1d: need at least 2 samples");
  std::vector<double> mag(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) *
                           static_cast<double>(i) / static_cast<double>(n);
      acc += static_cast<double>(signal[i]) * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    mag[k] = std::abs(acc);
  }
  return mag;
}

// Box filter along the scanline direction with symmetric reflection padding;
// DC gain is exactly 1.
inline Grid<float> lowpass(const Grid<float>& s, int radius) {
  if (radius < 1) throw std::invalid_argument("lowpass: radius must be >= 1");
  Grid<float> out(s.rows(), s.cols(), s.channels());
  const double norm = 1.0 / (2 * radius + 1);
  parallel_rows(s.rows(), [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r)
      for (int k = 0; k < s.channels(); ++k)
        for (int c = 0; c < s.cols(); ++c) {
          double acc = 0.0;
          for (int d = -radius; d <= radius; ++d)
            acc += s(r, reflect_index(c + d, s.cols()), k);
          out(r, c, k) = static_cast<float>(acc * norm);
        }
  });
  return out;
}

// E = sqrt(sum of squared differences) over all entries.
inline double retrieval_error(const Grid<float>& s, const Grid<float>& s_gt) {
  if (!s.same_shape(s_gt)) throw std::invalid_argument("retrieval_error: shape mismatch");
  double acc = 0.0;
  for (int r = 0; r < s.rows(); ++r)
    for (int c = 0; c < s.cols(); ++c)
      for (int k = 0; k < s.channels(); ++k) {
        const double d = static_cast<double>(s(r, c, k)) - s_gt(r, c, k);
        acc += d * d;
      }
  return std::sqrt(acc);
}

inline SparsePointSet nonzero_points(const DisparityMap& map, ValueUnit unit = ValueUnit::Pixels) {
  SparsePointSet set;
  set.rows = map.rows();
  set.cols = map.cols();
  set.unit = unit;
  for (int r = 0; r < map.rows(); ++r)
    for (int c = 0; c < map.cols(); ++c)
      if (is_valid(map(r, c)) && map(r, c) > 0.0f) set.points.push_back({r, c, map(r, c), 1.0f});
  return set;
}

struct ToyStudy {
  LocalCostSlab s_full, s_sparse, s_filled, s_zero;
  double lap_full = 0.0, lap_sparse = 0.0, lap_filled = 0.0, lap_zero = 0.0;
  double e_sparse = 0.0, e_filled = 0.0, e_zero = 0.0;
  double e_lp_sparse = 0.0, e_lp_filled = 0.0, e_lp_zero = 0.0;
};

// Retrieval under four initializations: ground truth, every-stride-th column,
// nearest-filled from those columns, and all-zero. Errors are L2 distances to
// the slab retrieved with ground truth, before and after low-pass filtering.
inline ToyStudy run_toy_study(const ToyPair& pair, int radius = 4, int stride = 6,
                              int lowpass_radius = 2) {
  const CostVolume vol = l1_cost_volume(pair.left, pair.right);
  const DisparityMap sparse = sparse_gt_disparity(pair.gt, stride);
  const DisparityMap filled = fill_nearest(nonzero_points(sparse));
  DisparityMap zero(pair.gt.rows(), pair.gt.cols());

  ToyStudy study{retrieve_local(vol, pair.gt, radius), retrieve_local(vol, sparse, radius),
                 retrieve_local(vol, filled, radius), retrieve_local(vol, zero, radius)};
  study.lap_full = laplacian_energy(study.s_full);
  study.lap_sparse = laplacian_energy(study.s_sparse);
  study.lap_filled = laplacian_energy(study.s_filled);
  study.lap_zero = laplacian_energy(study.s_zero);
  study.e_sparse = retrieval_error(study.s_sparse, study.s_full);
  study.e_filled = retrieval_error(study.s_filled, study.s_full);
  study.e_zero = retrieval_error(study.s_zero, study.s_full);
  const LocalCostSlab lp_full = lowpass(study.s_full, lowpass_radius);
  study.e_lp_sparse = retrieval_error(lowpass(study.s_sparse, lowpass_radius), lp_full);
  study.e_lp_filled = retrieval_error(lowpass(study.s_filled, lowpass_radius), lp_full);
  study.e_lp_zero = retrieval_error(lowpass(study.s_zero, lowpass_radius), lp_full);
  return study;
}

}  // namespace stereolab
