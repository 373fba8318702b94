#pragma once

#include <stdexcept>

#include "stereolab/grid.hpp"

namespace stereolab {

// Rectified pinhole pair: shared intrinsics, horizontal baseline.
struct CameraRig {
  double focal_px = 0.0;
  double baseline_m = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

inline void validate(const CameraRig& rig) {
  if (!(rig.focal_px > 0.0))
    throw std::domain_error("camera rig: focal_px must be > 0");
  if (!(rig.baseline_m > 0.0))
    throw std::domain_error("camera rig: baseline_m must be > 0");
}

// Left-camera frame, meters. +x right, +y down, +z forward.
struct Point3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double disparity_to_depth(double d, const CameraRig& rig) {
  if (!(d > 0.0)) throw std::domain_error("disparity_to_depth: disparity must be > 0");
  return rig.focal_px * rig.baseline_m / d;
}

inline double depth_to_disparity(double z, const CameraRig& rig) {
  if (!(z > 0.0)) throw std::domain_error("depth_to_disparity: depth must be > 0");
  return rig.focal_px * rig.baseline_m / z;
}

// Elementwise: invalid or non-positive pixels become the invalid sentinel.
inline DepthMap disparity_to_depth(const DisparityMap& d, const CameraRig& rig) {
  const double fb = rig.focal_px * rig.baseline_m;
  DepthMap z(d.rows(), d.cols());
  for (int r = 0; r < d.rows(); ++r)
    for (int c = 0; c < d.cols(); ++c) {
      const float v = d(r, c);
      z(r, c) = (is_valid(v) && v > 0.0f) ? static_cast<float>(fb / v) : kInvalid;
    }
  return z;
}

inline DisparityMap depth_to_disparity(const DepthMap& z, const CameraRig& rig) {
  const double fb = rig.focal_px * rig.baseline_m;
  DisparityMap d(z.rows(), z.cols());
  for (int r = 0; r < z.rows(); ++r)
    for (int c = 0; c < z.cols(); ++c) {
      const float v = z(r, c);
      d(r, c) = (is_valid(v) && v > 0.0f) ? static_cast<float>(fb / v) : kInvalid;
    }
  return d;
}

inline Point3D backproject(double row, double col, double z, const CameraRig& rig) {
  if (!(z > 0.0)) throw std::domain_error("backproject: depth must be > 0");
  return {(col - rig.cx) * z / rig.focal_px, (row - rig.cy) * z / rig.focal_px, z};
}

// Sub-pixel image coordinates of a 3D point in both rectified views.
// Rows coincide by construction; rasterization is left to the caller.
struct StereoProjection {
  double row = 0.0;
  double left_col = 0.0;
  double right_col = 0.0;
  double disparity = 0.0;
};

inline StereoProjection project_to_stereo(const Point3D& p, const CameraRig& rig) {
  if (!(p.z > 0.0)) throw std::domain_error("project_to_stereo: point must be in front of the camera");
  StereoProjection s;
  s.disparity = rig.focal_px * rig.baseline_m / p.z;
  s.left_col = rig.cx + rig.focal_px * p.x / p.z;
  s.right_col = s.left_col - s.disparity;
  s.row = rig.cy + rig.focal_px * p.y / p.z;
  return s;
}

inline bool in_frame(const StereoProjection& s, int rows, int cols) {
  return s.row >= 0.0 && s.row <= rows - 1.0 && s.left_col >= 0.0 &&
         s.left_col <= cols - 1.0 && s.right_col >= 0.0 && s.right_col <= cols - 1.0;
}

}  // namespace stereolab
