#include "mvo/error.hpp"
#include "mvo/stereo_camera.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace mvo;

TEST_CASE("project a point on the optical axis") {
  const StereoIntrinsics K;
  const StereoObservation o = project(K, Vec3(0, 0, 4));
  CHECK(o.u == doctest::Approx(K.cu));
  CHECK(o.v == doctest::Approx(K.cv));
  CHECK(o.d == doctest::Approx(K.fu * K.baseline / 4.0));
}

TEST_CASE("backproject inverts project") {
  const StereoIntrinsics K;
  std::mt19937_64 gen(2);
  for (int i = 0; i < 1000; ++i) {
    Vec3 p = testing::random_vec(gen, 2.0);
    p.z() = 0.5 + std::abs(p.z()) * 4;
    CHECK((backproject(K, project(K, p)) - p).norm() < 1e-9);
  }
}

TEST_CASE("sensor model errors") {
  const StereoIntrinsics K;
  try {
    project(K, Vec3(0, 0, -1));
    FAIL("expected BehindCamera");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BehindCamera);
  }
  try {
    backproject(K, {320, 240, K.min_disparity});
    FAIL("expected DisparityTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DisparityTooSmall);
  }
}

TEST_CASE("projection_jacobian matches central differences") {
  const StereoIntrinsics K;
  std::mt19937_64 gen(4);
  const double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Vec3 p = testing::random_vec(gen, 2.0);
    p.z() = 0.5 + std::abs(p.z()) * 4;
    const Mat3 J = projection_jacobian(K, p);
    Mat3 N;
    for (int c = 0; c < 3; ++c) {
      Vec3 d = Vec3::Zero();
      d(c) = h;
      N.col(c) = (project(K, p + d).vector() - project(K, p - d).vector()) / (2 * h);
    }
    worst = std::max(worst, (N - J).norm() / J.norm());
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("frustum bounds are half-open and include the right image") {
  StereoIntrinsics K;
  CHECK(in_frustum(K, Vec3(0, 0, 3)));
  CHECK_FALSE(in_frustum(K, Vec3(0, 0, 0.05)));  // nearer than z_near
  // left u exactly at the width edge is outside
  const double z = 3.0;
  const double x_edge = (K.width - K.cu) * z / K.fu;
  CHECK_FALSE(in_frustum(K, Vec3(x_edge, 0, z)));
  // left image just inside the left edge but the right image is off it
  const double x_left = (0.5 - K.cu) * z / K.fu;
  CHECK_FALSE(in_frustum(K, Vec3(x_left, 0, z)));
}

TEST_CASE("intrinsics validation names the field") {
  StereoIntrinsics K;
  K.baseline = 0.0;
  try {
    K.validate();
    FAIL("expected ConfigInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
    CHECK(std::string(e.what()).find("b") != std::string::npos);
  }
}
