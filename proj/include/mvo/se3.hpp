#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>

namespace mvo {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat46 = Eigen::Matrix<double, 4, 6>;

Mat3 skew(const Vec3& v);
Vec3 vee(const Mat3& m);

class Pose;

/// Orthonormal 3x3 matrix with det +1.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  /// Projects `m` onto SO(3) (polar decomposition), so a slightly drifted
  /// matrix is accepted.
  static Rotation from_matrix(const Mat3& m);
  static Rotation about_axis(const Vec3& axis, double angle);
  static Rotation about_x(double angle) { return about_axis(Vec3::UnitX(), angle); }
  static Rotation about_y(double angle) { return about_axis(Vec3::UnitY(), angle); }
  static Rotation about_z(double angle) { return about_axis(Vec3::UnitZ(), angle); }
  /// R = Rz(yaw) * Ry(pitch) * Rx(roll)
  static Rotation from_rpy(double roll, double pitch, double yaw);

  const Mat3& matrix() const { return m_; }
  Rotation inverse() const { return Rotation(m_.transpose(), Unchecked{}); }
  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_, Unchecked{}); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  /// Angle of the rotation in [0, pi].
  double angle() const;

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}
  Mat3 m_;

  friend class Pose;
  friend Pose compose(const Pose& a, const Pose& b);
};

/// Tangent vector (rho, phi): translational part first, rotational second.
struct Twist {
  Vec3 rho = Vec3::Zero();
  Vec3 phi = Vec3::Zero();

  Twist() = default;
  Twist(const Vec3& rho_, const Vec3& phi_) : rho(rho_), phi(phi_) {}
  explicit Twist(const Vec6& v) : rho(v.head<3>()), phi(v.tail<3>()) {}

  Vec6 vector() const {
    Vec6 v;
    v << rho, phi;
    return v;
  }
};

/// Rigid transform acting on points as p -> R p + t.
class Pose {
 public:
  Pose() = default;
  Pose(const Rotation& r, const Vec3& t) : rotation_(r), translation_(t) {}

  static Pose identity() { return Pose(); }
  static Pose from_translation(const Vec3& t) { return Pose(Rotation(), t); }
  static Pose from_matrix(const Mat4& m);
  /// Row-major top three rows of the homogeneous matrix. The rotation is
  /// projected onto SO(3) unless it is already orthonormal to 1e-12.
  static Pose from_row_major(const std::array<double, 12>& v);

  const Rotation& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Mat4 matrix() const;
  std::array<double, 12> to_row_major() const;

  Pose inverse() const;
  Vec3 operator*(const Vec3& p) const { return rotation_.m_ * p + translation_; }
  Pose operator*(const Pose& b) const { return compose(*this, b); }

  /// Number of compositions since the rotation was last re-orthonormalized.
  int composition_depth() const { return depth_; }

  friend Pose compose(const Pose& a, const Pose& b);

 private:
  Rotation rotation_;
  Vec3 translation_ = Vec3::Zero();
  int depth_ = 0;
};

/// a * b: applies b first, then a.
Pose compose(const Pose& a, const Pose& b);

Mat3 so3_exp(const Vec3& phi);
/// Left Jacobian of SO(3).
Mat3 so3_left_jacobian(const Vec3& phi);
Mat3 so3_left_jacobian_inverse(const Vec3& phi);

Pose exp(const Twist& xi);
/// Throws Error(AngleNearPi) when the rotation angle is within 1e-6 of pi.
Twist log(const Pose& T);

/// 4x6 operator with exp(xi^) h ~= h + circle_dot(h) * xi for small xi.
Mat46 circle_dot(const Vec4& h);

/// Roll-pitch-yaw of estimate * truth^T (error expressed in the reference
/// frame). Throws Error(GimbalLock) when pitch is within 1e-6 of +-pi/2.
Vec3 rpy_error(const Rotation& estimate, const Rotation& truth);

/// Inverse of Rotation::from_rpy. Throws Error(GimbalLock) near pitch +-pi/2.
Vec3 to_rpy(const Rotation& r);

inline constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

}  // namespace mvo
