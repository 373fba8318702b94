#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "stereolab/grid.hpp"
#include "stereolab/parallel.hpp"

namespace stereolab {

// Median over a (2r+1)^2 window truncated at the image border. radius 0 is
// the identity.
inline Grid<float> median_filter(const Grid<float>& in, int radius) {
  if (radius < 0) throw std::invalid_argument("median_filter: radius must be >= 0");
  if (radius == 0) return in;
  Grid<float> out(in.rows(), in.cols(), in.channels());
  parallel_rows(in.rows(), [&](int r0, int r1) {
    std::vector<float> window;
    for (int r = r0; r < r1; ++r)
      for (int c = 0; c < in.cols(); ++c)
        for (int k = 0; k < in.channels(); ++k) {
          window.clear();
          for (int dr = -radius; dr <= radius; ++dr) {
            const int rr = r + dr;
            if (rr < 0 || rr >= in.rows()) continue;
            for (int dc = -radius; dc <= radius; ++dc) {
              const int cc = c + dc;
              if (cc < 0 || cc >= in.cols()) continue;
              window.push_back(in(rr, cc, k));
            }
          }
          auto mid = window.begin() + window.size() / 2;
          std::nth_element(window.begin(), mid, window.end());
          out(r, c, k) = *mid;
        }
  });
  return out;
}

inline std::vector<float> gaussian_kernel(int radius, float sigma) {
  std::vector<float> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = static_cast<float>(v);
    sum += v;
  }
  for (auto& v : k) v = static_cast<float>(v / sum);
  return k;
}

// Separable Gaussian with border-clamped taps.
inline Grid<float> gaussian_blur(const Grid<float>& in, int radius, float sigma) {
  if (radius < 1) throw std::invalid_argument("gaussian_blur: radius must be >= 1");
  const auto kernel = gaussian_kernel(radius, sigma);
  Grid<float> tmp(in.rows(), in.cols(), in.channels());
  parallel_rows(in.rows(), [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r)
      for (int c = 0; c < in.cols(); ++c)
        for (int k = 0; k < in.channels(); ++k) {
          double acc = 0.0;
          for (int d = -radius; d <= radius; ++d)
            acc += kernel[static_cast<std::size_t>(d + radius)] *
                   in(r, clampi(c + d, 0, in.cols() - 1), k);
          tmp(r, c, k) = static_cast<float>(acc);
        }
  });
  Grid<float> out(in.rows(), in.cols(), in.channels());
  parallel_rows(in.rows(), [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r)
      for (int c = 0; c < in.cols(); ++c)
        for (int k = 0; k < in.channels(); ++k) {
          double acc = 0.0;
          for (int d = -radius; d <= radius; ++d)
            acc += kernel[static_cast<std::size_t>(d + radius)] *
                   in(clampi(r + d, 0, in.rows() - 1), c, k);
          out(r, c, k) = static_cast<float>(acc);
        }
  });
  return out;
}

// Index into [0, n) with symmetric (edge-repeating) reflection. Preserves the
// total mass of a box filter, so DC gain stays exactly 1.
inline int reflect_index(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

}  // namespace stereolab
