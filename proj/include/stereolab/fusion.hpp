#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "stereolab/geometry.hpp"
#include "stereolab/grid.hpp"

namespace stereolab {

// RGB + XYZ image; XYZ is (0,0,0) exactly wherever occupancy is false.
struct FusedImage {
  Image grid;                    // H x W x 6
  Grid<unsigned char> occupancy; // H x W
};

struct FusedPair {
  FusedImage left;
  FusedImage right;
  int dropped = 0;  // points lost to out-of-frame right projections or z-buffer collisions
};

// Projects every depth sample into both views and concatenates its XYZ triple
// onto the RGB channels of both. The same float triple lands on both sides,
// collisions keep the nearest point, and a point that cannot be placed in the
// right view is removed from the left as well, so the multiset of XYZ triples
// is identical across the pair.
inline FusedPair augment_images(const Image& left, const Image& right,
                                const SparsePointSet& points, const CameraRig& rig) {
  if (!left.same_shape(right)) throw std::invalid_argument("augment_images: image shape mismatch");
  if (left.channels() != 3) throw std::invalid_argument("augment_images: images must be RGB");
  if (points.unit != ValueUnit::Meters)
    throw std::invalid_argument("augment_images: point values must be depths in meters");
  if (points.rows != left.rows() || points.cols != left.cols())
    throw std::invalid_argument("augment_images: point frame must match the images");
  validate(points);
  validate(rig);

  const int rows = left.rows(), cols = left.cols();
  struct Candidate {
    int row, left_col, right_col;
    Point3D p;
  };
  std::vector<Candidate> cands;
  cands.reserve(points.points.size());
  int dropped = 0;
  for (const auto& pt : points.points) {
    const Point3D p = backproject(pt.row, pt.col, pt.value, rig);
    const StereoProjection proj = project_to_stereo(p, rig);
    const int rc = static_cast<int>(std::lround(proj.right_col));
    if (rc < 0 || rc >= cols) {
      ++dropped;
      continue;
    }
    cands.push_back({pt.row, pt.col, rc, p});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.left_col != b.left_col) return a.left_col < b.left_col;
    return a.p.z < b.p.z;
  });

  // Right-pixel z-buffer: first (nearest) point wins; losers leave the pair.
  std::vector<Candidate> winners;
  winners.reserve(cands.size());
  std::vector<const Candidate*> slot(static_cast<std::size_t>(rows) * cols, nullptr);
  for (const auto& c : cands) {
    auto& s = slot[static_cast<std::size_t>(c.row) * cols + c.right_col];
    if (s == nullptr || c.p.z < s->p.z)
      s = &c;
  }
  for (const auto& c : cands) {
    if (slot[static_cast<std::size_t>(c.row) * cols + c.right_col] == &c)
      winners.push_back(c);
    else
      ++dropped;
  }

  FusedPair out{{Image(rows, cols, 6), Grid<unsigned char>(rows, cols)},
                {Image(rows, cols, 6), Grid<unsigned char>(rows, cols)},
                dropped};
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      for (int k = 0; k < 3; ++k) {
        out.left.grid(r, c, k) = left(r, c, k);
        out.right.grid(r, c, k) = right(r, c, k);
      }
  for (const auto& w : winners) {
    const float xyz[3] = {static_cast<float>(w.p.x), static_cast<float>(w.p.y),
                          static_cast<float>(w.p.z)};
    for (int k = 0; k < 3; ++k) {
      out.left.grid(w.row, w.left_col, 3 + k) = xyz[k];
      out.right.grid(w.row, w.right_col, 3 + k) = xyz[k];
    }
    out.left.occupancy(w.row, w.left_col) = 1;
    out.right.occupancy(w.row, w.right_col) = 1;
  }
  return out;
}

}  // namespace stereolab
