#pragma once

#include "mvo/se3.hpp"

namespace mvo {

/// Rectified stereo rig: identical left/right pinhole intrinsics, horizontal
/// baseline. Pixels for f/c, meters for baseline.
struct StereoIntrinsics {
  double fu = 400.0;
  double fv = 400.0;
  double cu = 320.0;
  double cv = 240.0;
  double baseline = 0.24;
  int width = 640;
  int height = 480;
  double z_near = 0.1;
  double min_disparity = 0.5;

  /// Throws Error(ConfigInvalid) naming the offending field.
  void validate() const;
};

/// (u, v) in the left image, d = u_left - u_right.
struct StereoObservation {
  double u = 0.0;
  double v = 0.0;
  double d = 0.0;

  Vec3 vector() const { return Vec3(u, v, d); }
  static StereoObservation from_vector(const Vec3& y) { return {y.x(), y.y(), y.z()}; }
};

/// Throws Error(BehindCamera) when p.z <= 1e-6.
StereoObservation project(const StereoIntrinsics& K, const Vec3& p);

/// Throws Error(DisparityTooSmall) when obs.d <= K.min_disparity.
Vec3 backproject(const StereoIntrinsics& K, const StereoObservation& obs);

/// d(u, v, d) / d(x, y, z).
Mat3 projection_jacobian(const StereoIntrinsics& K, const Vec3& p);

/// z > z_near and both the left and right projections fall in [0,w) x [0,h).
bool in_frustum(const StereoIntrinsics& K, const Vec3& p);

/// Left-image (u, v) only; no depth check. Hot path for residuals.
inline Eigen::Vector2d project_uv(const StereoIntrinsics& K, const Vec3& p) {
  const double iz = 1.0 / p.z();
  return {K.fu * p.x() * iz + K.cu, K.fv * p.y() * iz + K.cv};
}

}  // namespace mvo
