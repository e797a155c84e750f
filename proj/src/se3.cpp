#include "mvo/se3.hpp"

#include "mvo/error.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace mvo {

namespace {

constexpr double kSmallAngle = 1e-4;
constexpr int kReorthonormalizeEvery = 100;

Mat3 polar_project(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0) u.col(2) *= -1.0;
  return u * v.transpose();
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AngleNearPi: return "AngleNearPi";
    case ErrorCode::GimbalLock: return "GimbalLock";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::DisparityTooSmall: return "DisparityTooSmall";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::NoModelsFound: return "NoModelsFound";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  // clang-format off
  s <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return s;
}

Vec3 vee(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

Rotation Rotation::from_matrix(const Mat3& m) { return Rotation(polar_project(m), Unchecked{}); }

Rotation Rotation::about_axis(const Vec3& axis, double angle) {
  return Rotation(so3_exp(axis.normalized() * angle), Unchecked{});
}

Rotation Rotation::from_rpy(double roll, double pitch, double yaw) {
  return about_z(yaw) * about_y(pitch) * about_x(roll);
}

double Rotation::angle() const {
  const double s = 0.5 * vee(m_ - m_.transpose()).norm();
  const double c = 0.5 * (m_.trace() - 1.0);
  return std::atan2(s, c);
}

Pose Pose::from_matrix(const Mat4& m) {
  return Pose(Rotation::from_matrix(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>());
}

Pose Pose::from_row_major(const std::array<double, 12>& v) {
  Mat3 r;
  Vec3 t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r(i, j) = v[4 * i + j];
    t(i) = v[4 * i + 3];
  }
  // already-orthonormal input (our own dumps) is kept bit for bit
  if ((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12 && r.determinant() > 0.0) {
    return Pose(Rotation(r, Rotation::Unchecked{}), t);
  }
  return Pose(Rotation::from_matrix(r), t);
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_.m_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

std::array<double, 12> Pose::to_row_major() const {
  std::array<double, 12> v{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) v[4 * i + j] = rotation_.m_(i, j);
    v[4 * i + 3] = translation_(i);
  }
  return v;
}

Pose Pose::inverse() const {
  Pose out;
  out.rotation_ = rotation_.inverse();
  out.translation_ = -(out.rotation_.m_ * translation_);
  out.depth_ = depth_;
  return out;
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.rotation_.m_ = a.rotation_.m_ * b.rotation_.m_;
  out.translation_ = a.rotation_.m_ * b.translation_ + a.translation_;
  out.depth_ = std::max(a.depth_, b.depth_) + 1;
  if (out.depth_ >= kReorthonormalizeEvery) {
    out.rotation_.m_ = polar_project(out.rotation_.m_);
    out.depth_ = 0;
  }
  return out;
}

Mat3 so3_exp(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a, b;
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 w = skew(phi);
  return Mat3::Identity() + a * w + b * w * w;
}

Mat3 so3_left_jacobian(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  double b, c;
  if (theta < kSmallAngle) {
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    c = 1.0 / 6.0 - theta2 / 120.0 + theta2 * theta2 / 5040.0;
  } else {
    b = (1.0 - std::cos(theta)) / theta2;
    c = (theta - std::sin(theta)) / (theta2 * theta);
  }
  const Mat3 w = skew(phi);
  return Mat3::Identity() + b * w + c * w * w;
}

Mat3 so3_left_jacobian_inverse(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  double d;
  // The closed form loses about 1e-16 / theta^2 to cancellation, so the
  // series covers a wider range here.
  if (theta < 1e-2) {
    d = 1.0 / 12.0 + theta2 / 720.0 + theta2 * theta2 / 30240.0 + theta2 * theta2 * theta2 / 1209600.0;
  } else {
    d = (1.0 - theta * std::sin(theta) / (2.0 * (1.0 - std::cos(theta)))) / theta2;
  }
  const Mat3 w = skew(phi);
  return Mat3::Identity() - 0.5 * w + d * w * w;
}

Pose exp(const Twist& xi) {
  return Pose(Rotation::from_matrix(so3_exp(xi.phi)), so3_left_jacobian(xi.phi) * xi.rho);
}

Twist log(const Pose& T) {
  const Mat3& r = T.rotation().matrix();
  const Vec3 axis_sin = 0.5 * vee(r - r.transpose());  // sin(theta) * axis
  const double s = axis_sin.norm();
  const double c = 0.5 * (r.trace() - 1.0);
  const double theta = std::atan2(s, c);
  if (kPi - theta < 1e-6) {
    throw Error(ErrorCode::AngleNearPi, "rotation angle " + std::to_string(theta) + " is too close to pi");
  }
  double factor;  // theta / sin(theta)
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    factor = 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0;
  } else {
    factor = theta / s;
  }
  const Vec3 phi = factor * axis_sin;
  return Twist(so3_left_jacobian_inverse(phi) * T.translation(), phi);
}

Mat46 circle_dot(const Vec4& h) {
  Mat46 out = Mat46::Zero();
  out.topLeftCorner<3, 3>() = h(3) * Mat3::Identity();
  out.topRightCorner<3, 3>() = -skew(h.head<3>());
  return out;
}

Vec3 to_rpy(const Rotation& rot) {
  const Mat3& r = rot.matrix();
  const double sp = std::clamp(-r(2, 0), -1.0, 1.0);
  const double pitch = std::asin(sp);
  if (kPi / 2.0 - std::abs(pitch) < 1e-6) {
    throw Error(ErrorCode::GimbalLock, "pitch within 1e-6 of +-pi/2");
  }
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return Vec3(roll, pitch, yaw);
}

Vec3 rpy_error(const Rotation& estimate, const Rotation& truth) {
  return to_rpy(estimate * truth.inverse());
}

}  // namespace mvo
