#pragma once

#include <cmath>
#include <stdexcept>

#include "stereolab/grid.hpp"
#include "stereolab/parallel.hpp"

namespace stereolab {

enum class FeatureMethod { Census, Zncc, Raw };

namespace detail {

inline void census_features(const Image& img, int window, FeatureMap& out) {
  const int rows = img.rows(), cols = img.cols(), ch = img.channels();
  const int rad = window / 2;
  const int dims = ch * (window * window - 1);
  const float scale = 1.0f / std::sqrt(static_cast<float>(dims));
  parallel_rows(rows, [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r)
      for (int c = 0; c < cols; ++c) {
        int j = 0;
        for (int k = 0; k < ch; ++k) {
          const float center = img(r, c, k);
          for (int dr = -rad; dr <= rad; ++dr)
            for (int dc = -rad; dc <= rad; ++dc) {
              if (dr == 0 && dc == 0) continue;
              const float v = img(clampi(r + dr, 0, rows - 1), clampi(c + dc, 0, cols - 1), k);
              out(r, c, j++) = (v > center) ? scale : -scale;
            }
        }
      }
  });
}

inline void zncc_features(const Image& img, int window, FeatureMap& out) {
  const int rows = img.rows(), cols = img.cols(), ch = img.channels();
  const int rad = window / 2;
  const int dims = ch * window * window;
  parallel_rows(rows, [&](int r0, int r1) {
    std::vector<float> patch(static_cast<std::size_t>(dims));
    for (int r = r0; r < r1; ++r)
      for (int c = 0; c < cols; ++c) {
        int j = 0;
        double sum = 0.0;
        for (int dr = -rad; dr <= rad; ++dr)
          for (int dc = -rad; dc <= rad; ++dc)
            for (int k = 0; k < ch; ++k) {
              const float v = img(clampi(r + dr, 0, rows - 1), clampi(c + dc, 0, cols - 1), k);
              patch[j++] = v;
              sum += v;
            }
        const float mean = static_cast<float>(sum / dims);
        double norm2 = 0.0;
        for (int i = 0; i < dims; ++i) {
          patch[i] -= mean;
          norm2 += static_cast<double>(patch[i]) * patch[i];
        }
        // Zero-variance patches map to the zero vector (correlation 0).
        const float inv = norm2 > 1e-24 ? static_cast<float>(1.0 / std::sqrt(norm2)) : 0.0f;
        for (int i = 0; i < dims; ++i) out(r, c, i) = patch[i] * inv;
      }
  });
}

inline void raw_features(const Image& img, FeatureMap& out) {
  const int rows = img.rows(), cols = img.cols(), ch = img.channels();
  parallel_rows(rows, [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r)
      for (int c = 0; c < cols; ++c) {
        double norm2 = 0.0;
        for (int k = 0; k < ch; ++k) norm2 += static_cast<double>(img(r, c, k)) * img(r, c, k);
        const float inv = norm2 > 1e-24 ? static_cast<float>(1.0 / std::sqrt(norm2)) : 0.0f;
        for (int k = 0; k < ch; ++k) out(r, c, k) = img(r, c, k) * inv;
      }
  });
}

}  // namespace detail

// Classical per-pixel descriptors; every output vector has unit L2 norm, with
// degenerate (zero-variance / all-zero) pixels mapping to the zero vector.
// Census and zncc are invariant to a constant brightness offset.
inline FeatureMap featurize(const Image& img, FeatureMethod method, int window) {
  if (method != FeatureMethod::Raw && (window < 3 || window % 2 == 0))
    throw std::invalid_argument("featurize: window must be odd and >= 3");
  const int ch = img.channels();
  switch (method) {
    case FeatureMethod::Census: {
      FeatureMap out(img.rows(), img.cols(), ch * (window * window - 1));
      detail::census_features(img, window, out);
      return out;
    }
    case FeatureMethod::Zncc: {
      FeatureMap out(img.rows(), img.cols(), ch * window * window);
      detail::zncc_features(img, window, out);
      return out;
    }
    case FeatureMethod::Raw: {
      FeatureMap out(img.rows(), img.cols(), ch);
      detail::raw_features(img, out);
      return out;
    }
  }
  throw std::invalid_argument("featurize: unknown method");
}

// C(h, w, w') = sum_j Xl(h, w, j) * Xr(h, w', j).
inline CostVolume build_correlation(const FeatureMap& left, const FeatureMap& right) {
  if (!left.same_shape(right))
    throw std::invalid_argument("build_correlation: feature maps must share H, W and J");
  const int rows = left.rows(), cols = left.cols(), dims = left.channels();
  CostVolume vol(rows, cols, cols);
  parallel_rows(rows, [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r)
      for (int w = 0; w < cols; ++w) {
        const float* fl = &left(r, w, 0);
        for (int wp = 0; wp < cols; ++wp) {
          const float* fr = &right(r, wp, 0);
          float acc = 0.0f;
          for (int j = 0; j < dims; ++j) acc += fl[j] * fr[j];
          vol(r, w, wp) = acc;
        }
      }
  });
  return vol;
}

// Linear interpolation along w' with border clamping. Integer positions hit
// the stored value exactly.
inline float sample_volume(const CostVolume& vol, int h, int w, float col) {
  const int last = vol.channels() - 1;
  if (!(col > 0.0f)) return vol(h, w, 0);
  if (col >= static_cast<float>(last)) return vol(h, w, last);
  const int i0 = static_cast<int>(col);
  const float a = col - static_cast<float>(i0);
  if (a == 0.0f) return vol(h, w, i0);
  return (1.0f - a) * vol(h, w, i0) + a * vol(h, w, i0 + 1);
}

// S(h, w, k) = C(h, w, w - D(h, w) + k), k in [-K, K]; channel index k + K.
inline LocalCostSlab retrieve_local(const CostVolume& vol, const DisparityMap& disp, int radius) {
  if (radius < 1) throw std::invalid_argument("retrieve_local: radius must be >= 1");
  if (disp.rows() != vol.rows() || disp.cols() != vol.cols())
    throw std::invalid_argument("retrieve_local: disparity shape must match the volume");
  for (int r = 0; r < disp.rows(); ++r)
    for (int c = 0; c < disp.cols(); ++c)
      if (!is_valid(disp(r, c)))
        throw std::domain_error("retrieve_local: disparity must be finite everywhere");

  LocalCostSlab slab(vol.rows(), vol.cols(), 2 * radius + 1);
  parallel_rows(vol.rows(), [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r)
      for (int w = 0; w < vol.cols(); ++w) {
        const float base = static_cast<float>(w) - disp(r, w);
        for (int k = -radius; k <= radius; ++k)
          slab(r, w, k + radius) = sample_volume(vol, r, w, base + static_cast<float>(k));
      }
  });
  return slab;
}

// Disparity-indexed read of an absolute-column volume: at(h, w, d) = C(h, w, w - d).
class DisparityView {
 public:
  explicit DisparityView(const CostVolume& vol) : vol_(&vol) {}
  float at(int h, int w, float d) const {
    return sample_volume(*vol_, h, w, static_cast<float>(w) - d);
  }

 private:
  const CostVolume* vol_;
};

}  // namespace stereolab
