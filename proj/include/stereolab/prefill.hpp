#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "stereolab/filters.hpp"
#include "stereolab/grid.hpp"
#include "stereolab/parallel.hpp"

namespace stereolab {

struct NearestField {
  Grid<float> value;     // value of the Euclidean-nearest sample
  Grid<float> distance;  // distance to it, in pixels
};

// Exact nearest-neighbor fill. Ties break to the earlier sample in row-major
// order, which also makes the result independent of input ordering.
inline NearestField nearest_field(const SparsePointSet& set) {
  validate(set);
  if (set.points.empty()) throw std::domain_error("nearest_field: at least one sample required");
  std::vector<SparsePoint> pts = set.points;
  std::sort(pts.begin(), pts.end(), [](const SparsePoint& a, const SparsePoint& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  NearestField field{Grid<float>(set.rows, set.cols), Grid<float>(set.rows, set.cols)};
  parallel_rows(set.rows, [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r)
      for (int c = 0; c < set.cols; ++c) {
        long best = -1;
        float best_value = 0.0f;
        for (const auto& p : pts) {
          const long dr = p.row - r, dc = p.col - c;
          const long d2 = dr * dr + dc * dc;
          if (best < 0 || d2 < best) {
            best = d2;
            best_value = p.value;
          }
        }
        field.value(r, c) = best_value;
        field.distance(r, c) = std::sqrt(static_cast<float>(best));
      }
  });
  return field;
}

inline Grid<float> fill_nearest(const SparsePointSet& set) { return nearest_field(set).value; }

// Confidence surrogate for subsampling: closer to a real measurement is more
// trustworthy.
inline Grid<float> distance_confidence(const SparsePointSet& set) {
  NearestField field = nearest_field(set);
  Grid<float> conf(set.rows, set.cols);
  for (int r = 0; r < set.rows; ++r)
    for (int c = 0; c < set.cols; ++c) conf(r, c) = -field.distance(r, c);
  return conf;
}

struct IpBasicParams {
  float max_value = 100.0f;  // inversion pivot; depths must lie in (0, max_value)
  int dilate_radius = 2;     // 5x5 diamond
  int close_radius = 2;      // 5x5 full
  int large_radius = 15;     // 31x31 full
  int median_radius = 2;  // 0 disables the smoothing pass
  int blur_radius = 2;    // 0 disables the blur pass
  float blur_sigma = 1.1f;
  bool invert = true;  // true for depths (near dominates); false for disparities
};

namespace detail {

using OccMask = Grid<unsigned char>;

// Fill-only grayscale dilation: empty pixels take the max occupied value
// within the kernel; occupied pixels are never rewritten.
inline bool dilate_into_empty(Grid<float>& val, OccMask& occ, int radius, bool diamond) {
  Grid<float> next_val = val;
  OccMask next_occ = occ;
  bool changed = false;
  for (int r = 0; r < val.rows(); ++r)
    for (int c = 0; c < val.cols(); ++c) {
      if (occ(r, c)) continue;
      bool found = false;
      float best = 0.0f;
      for (int dr = -radius; dr <= radius; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= val.rows()) continue;
        for (int dc = -radius; dc <= radius; ++dc) {
          if (diamond && std::abs(dr) + std::abs(dc) > radius) continue;
          const int cc = c + dc;
          if (cc < 0 || cc >= val.cols()) continue;
          if (!occ(rr, cc)) continue;
          if (!found || val(rr, cc) > best) {
            best = val(rr, cc);
            found = true;
          }
        }
      }
      if (found) {
        next_val(r, c) = best;
        next_occ(r, c) = 1;
        changed = true;
      }
    }
  val = std::move(next_val);
  occ = std::move(next_occ);
  return changed;
}

inline OccMask binary_dilate(const OccMask& m, int radius) {
  OccMask out(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      unsigned char v = 0;
      for (int dr = -radius; dr <= radius && !v; ++dr)
        for (int dc = -radius; dc <= radius && !v; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr >= 0 && rr < m.rows() && cc >= 0 && cc < m.cols() && m(rr, cc)) v = 1;
        }
      out(r, c) = v;
    }
  return out;
}

inline OccMask binary_erode(const OccMask& m, int radius) {
  OccMask out(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      // Out-of-frame neighbors count as empty, so closing cannot grow the
      // occupied region past the frame border.
      unsigned char v = 1;
      for (int dr = -radius; dr <= radius && v; ++dr)
        for (int dc = -radius; dc <= radius && v; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= m.rows() || cc < 0 || cc >= m.cols() || !m(rr, cc)) v = 0;
        }
      out(r, c) = v;
    }
  return out;
}

}  // namespace detail

// Morphological densification. All dilation-style steps only write into empty
// pixels, so sample values survive verbatim; the final median/Gaussian pass
// rewrites originally-empty pixels only.
inline DepthMap fill_ipbasic(const SparsePointSet& set, const IpBasicParams& params = {}) {
  validate(set);
  if (set.points.empty()) throw std::domain_error("fill_ipbasic: at least one sample required");
  const int rows = set.rows, cols = set.cols;

  Grid<float> work(rows, cols);
  detail::OccMask occ(rows, cols);
  for (const auto& p : set.points) {
    if (params.invert && !(p.value < params.max_value))
      throw std::domain_error("fill_ipbasic: depth must be below the inversion pivot");
    work(p.row, p.col) = params.invert ? params.max_value - p.value : p.value;
    occ(p.row, p.col) = 1;
  }
  const detail::OccMask original = occ;

  detail::dilate_into_empty(work, occ, params.dilate_radius, /*diamond=*/true);

  // Closing fills pixels that survive dilate-then-erode of the occupancy;
  // each such pixel has an occupied neighbor within the kernel to copy from.
  detail::OccMask closed =
      detail::binary_erode(detail::binary_dilate(occ, params.close_radius), params.close_radius);
  {
    Grid<float> next_val = work;
    detail::OccMask next_occ = occ;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        if (occ(r, c) || !closed(r, c)) continue;
        bool found = false;
        float best = 0.0f;
        for (int dr = -params.close_radius; dr <= params.close_radius; ++dr)
          for (int dc = -params.close_radius; dc <= params.close_radius; ++dc) {
            const int rr = r + dr, cc = c + dc;
            if (rr < 0 || rr >= rows || cc < 0 || cc >= cols || !occ(rr, cc)) continue;
            if (!found || work(rr, cc) > best) {
              best = work(rr, cc);
              found = true;
            }
          }
        if (found) {
          next_val(r, c) = best;
          next_occ(r, c) = 1;
        }
      }
    work = std::move(next_val);
    occ = std::move(next_occ);
  }

  for (int c = 0; c < cols; ++c) {
    int top = -1;
    for (int r = 0; r < rows; ++r)
      if (occ(r, c)) {
        top = r;
        break;
      }
    for (int r = 0; r < top; ++r) {
      work(r, c) = work(top, c);
      occ(r, c) = 1;
    }
  }

  // Keep dilating with the large kernel until dense; occupancy grows by the
  // kernel radius per pass, so this terminates.
  for (;;) {
    bool empty_left = false;
    for (int r = 0; r < rows && !empty_left; ++r)
      for (int c = 0; c < cols && !empty_left; ++c)
        if (!occ(r, c)) empty_left = true;
    if (!empty_left) break;
    detail::dilate_into_empty(work, occ, params.large_radius, /*diamond=*/false);
  }

  if (params.median_radius > 0) {
    Grid<float> med = median_filter(work, params.median_radius);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (!original(r, c)) work(r, c) = med(r, c);
  }
  if (params.blur_radius > 0) {
    Grid<float> blurred = gaussian_blur(work, params.blur_radius, params.blur_sigma);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (!original(r, c)) work(r, c) = blurred(r, c);
  }

  if (params.invert)
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) work(r, c) = params.max_value - work(r, c);
  return work;
}

struct TopkResult {
  SparsePointSet set;
  bool truncated = false;  // fewer valid pixels than requested
};

// Highest-confidence pixels of a dense map, ties broken row-major.
inline TopkResult subsample_topk(const Grid<float>& dense, const Grid<float>& confidence, int k,
                                 ValueUnit unit = ValueUnit::Meters) {
  if (k < 1) throw std::invalid_argument("subsample_topk: k must be >= 1");
  if (!dense.same_shape(confidence))
    throw std::invalid_argument("subsample_topk: confidence shape must match the map");
  struct Entry {
    float conf;
    int row, col;
  };
  std::vector<Entry> entries;
  for (int r = 0; r < dense.rows(); ++r)
    for (int c = 0; c < dense.cols(); ++c) {
      if (!is_valid(dense(r, c)) || !(dense(r, c) > 0.0f)) continue;
      if (!std::isfinite(confidence(r, c)))
        throw std::domain_error("subsample_topk: confidence must be finite");
      entries.push_back({confidence(r, c), r, c});
    }
  const auto better = [](const Entry& a, const Entry& b) {
    if (a.conf != b.conf) return a.conf > b.conf;
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  };
  TopkResult res;
  res.truncated = static_cast<std::size_t>(k) > entries.size();
  const std::size_t take = std::min(static_cast<std::size_t>(k), entries.size());
  std::partial_sort(entries.begin(), entries.begin() + take, entries.end(), better);
  entries.resize(take);
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  res.set.rows = dense.rows();
  res.set.cols = dense.cols();
  res.set.unit = unit;
  for (const auto& e : entries)
    res.set.points.push_back({e.row, e.col, dense(e.row, e.col), e.conf});
  return res;
}

}  // namespace stereolab
