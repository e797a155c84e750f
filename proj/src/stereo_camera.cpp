#include "mvo/stereo_camera.hpp"

#include "mvo/error.hpp"

#include <cmath>
#include <string>

namespace mvo {

void StereoIntrinsics::validate() const {
  auto require = [](bool ok, const char* field, const char* rule) {
    if (!ok) throw Error(ErrorCode::ConfigInvalid, std::string("intrinsics.") + field + " " + rule);
  };
  require(fu > 0.0, "fu", "must be > 0");
  require(fv > 0.0, "fv", "must be > 0");
  require(baseline > 0.0, "b", "must be > 0");
  require(width > 0, "width", "must be > 0");
  require(height > 0, "height", "must be > 0");
  require(z_near >= 0.0, "z_near", "must be >= 0");
  require(min_disparity >= 0.0, "min_disparity", "must be >= 0");
}

StereoObservation project(const StereoIntrinsics& K, const Vec3& p) {
  if (p.z() <= 1e-6) throw Error(ErrorCode::BehindCamera, "point depth " + std::to_string(p.z()));
  const double iz = 1.0 / p.z();
  return {K.fu * p.x() * iz + K.cu, K.fv * p.y() * iz + K.cv, K.fu * K.baseline * iz};
}

Vec3 backproject(const StereoIntrinsics& K, const StereoObservation& obs) {
  if (obs.d <= K.min_disparity) {
    throw Error(ErrorCode::DisparityTooSmall, "disparity " + std::to_string(obs.d));
  }
  const double z = K.fu * K.baseline / obs.d;
  return {(obs.u - K.cu) * z / K.fu, (obs.v - K.cv) * z / K.fv, z};
}

Mat3 projection_jacobian(const StereoIntrinsics& K, const Vec3& p) {
  const double iz = 1.0 / p.z();
  const double iz2 = iz * iz;
  Mat3 j;
  // clang-format off
  j << K.fu * iz, 0.0,       -K.fu * p.x() * iz2,
       0.0,       K.fv * iz, -K.fv * p.y() * iz2,
       0.0,       0.0,       -K.fu * K.baseline * iz2;
  // clang-format on
  return j;
}

bool in_frustum(const StereoIntrinsics& K, const Vec3& p) {
  if (!(p.z() > K.z_near) || p.z() <= 1e-6) return false;
  const StereoObservation o = project(K, p);
  const double w = K.width, h = K.height;
  const double ur = o.u - o.d;
  return o.u >= 0.0 && o.u < w && ur >= 0.0 && ur < w && o.v >= 0.0 && o.v < h;
}

}  // namespace mvo
