#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace stereolab {

// Invalid-pixel sentinel carried by every float grid (depth, disparity, image).
inline constexpr float kInvalid = std::numeric_limits<float>::quiet_NaN();

// Disparity ceiling applied by the refiner and the evaluation metrics.
inline constexpr float kDefaultMaxDisparity = 192.0f;

inline bool is_valid(float v) { return std::isfinite(v); }

// File or stream contents that do not match the expected on-disk format.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense row-major H x W x C grid; the channel index varies fastest.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, int channels = 1)
      : rows_(rows), cols_(cols), channels_(channels),
        data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) *
                  static_cast<std::size_t>(channels),
              T{}) {
    assert(rows >= 0 && cols >= 0 && channels >= 1);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int r, int c, int ch = 0) { return data_[index(r, c, ch)]; }
  const T& operator()(int r, int c, int ch = 0) const { return data_[index(r, c, ch)]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Grid& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && channels_ == o.channels_;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.channels_ == b.channels_ &&
           a.data_ == b.data_;
  }

 private:
  std::size_t index(int r, int c, int ch) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    assert(ch >= 0 && ch < channels_);
    return (static_cast<std::size_t>(r) * cols_ + c) * channels_ + ch;
  }

  int rows_ = 0;
  int cols_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

using DisparityMap = Grid<float>;   // pixels
using DepthMap = Grid<float>;       // meters unless stated otherwise
using Image = Grid<float>;          // RGB in [0,1]; fused variants carry 6 channels
using Mask = Grid<std::uint8_t>;
using FeatureMap = Grid<float>;     // unit-norm (or all-zero) per-pixel descriptors
using CostVolume = Grid<float>;     // C(h, w, w'): left (h,w) scored against right (h,w')
using LocalCostSlab = Grid<float>;  // S(h, w, k): channels span offsets [-K, K]

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

struct SparsePoint {
  int row = 0;
  int col = 0;
  float value = 0.0f;
  float confidence = 1.0f;
};

enum class ValueUnit : std::uint8_t { Meters, Pixels };

// (row, col, value) samples standing in for LiDAR returns projected into the
// left image. `rows`/`cols` record the frame the coordinates live in.
struct SparsePointSet {
  int rows = 0;
  int cols = 0;
  ValueUnit unit = ValueUnit::Pixels;
  std::vector<SparsePoint> points;
};

// In-frame coordinates, positive values, no duplicate (row, col).
inline void validate(const SparsePointSet& set) {
  std::vector<std::int64_t> seen;
  seen.reserve(set.points.size());
  for (const SparsePoint& p : set.points) {
    if (p.row < 0 || p.row >= set.rows || p.col < 0 || p.col >= set.cols)
      throw std::domain_error("sparse points: coordinate outside frame");
    if (!(p.value > 0.0f) || !std::isfinite(p.value))
      throw std::domain_error("sparse points: values must be positive and finite");
    seen.push_back(static_cast<std::int64_t>(p.row) * set.cols + p.col);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw std::domain_error("sparse points: duplicate (row, col) coordinate");
}

}  // namespace stereolab
