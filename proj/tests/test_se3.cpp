#include "mvo/error.hpp"
#include "mvo/se3.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace mvo;
using testing::pose_distance;

TEST_CASE("compose: identity, inverse, and quarter turns") {
  CHECK(pose_distance(compose(Pose(), Pose()), Pose()) == 0.0);

  std::mt19937_64 gen(7);
  const Pose T = testing::random_pose(gen);
  CHECK(pose_distance(compose(T, T.inverse()), Pose()) < 1e-12);

  const Pose rz90(Rotation::about_z(kPi / 2), Vec3::Zero());
  const Pose rz180(Rotation::about_z(kPi), Vec3::Zero());
  CHECK(pose_distance(rz90 * rz90, rz180) < 1e-12);
}

TEST_CASE("compose applies the right operand first") {
  const Pose shift = Pose::from_translation(Vec3(1, 0, 0));
  const Pose turn(Rotation::about_z(kPi / 2), Vec3::Zero());
  // turn * shift: move to (1,0,0), then rotate to (0,1,0)
  const Vec3 p = (turn * shift) * Vec3::Zero();
  CHECK(p.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.y() == doctest::Approx(1.0));
}

TEST_CASE("compose agrees with 4x4 homogeneous products") {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 1000; ++i) {
    const Pose a = testing::random_pose(gen, 5.0), b = testing::random_pose(gen, 5.0);
    const Mat4 oracle = a.matrix() * b.matrix();
    CHECK((compose(a, b).matrix() - oracle).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("inverse of a product reverses the order") {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 100; ++i) {
    const Pose a = testing::random_pose(gen), b = testing::random_pose(gen);
    CHECK(pose_distance((a * b).inverse(), b.inverse() * a.inverse()) < 1e-9);
  }
}

TEST_CASE("exp of simple twists") {
  CHECK(pose_distance(exp(Twist()), Pose()) == 0.0);

  const Pose t = exp(Twist(Vec3(1, 0, 0), Vec3::Zero()));
  CHECK((t.translation() - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK((t.rotation().matrix() - Mat3::Identity()).norm() < 1e-15);

  const Pose r = exp(Twist(Vec3::Zero(), Vec3(0, 0, kPi / 2)));
  Mat3 rodrigues;
  rodrigues << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((r.rotation().matrix() - rodrigues).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("log of simple poses") {
  CHECK(log(Pose()).vector().norm() == 0.0);
  const Twist xi = log(Pose(Rotation::about_z(kPi / 2), Vec3::Zero()));
  CHECK((xi.vector() - (Vec6() << 0, 0, 0, 0, 0, kPi / 2).finished()).norm() < 1e-12);
}

TEST_CASE("exp/log round trip over random twists") {
  std::mt19937_64 gen(1);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Twist xi = testing::random_twist(gen, 2.0, 3.0);
    worst = std::max(worst, (log(exp(xi)).vector() - xi.vector()).norm());
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("exp/log stay accurate through the small-angle switch") {
  for (double a : {0.0, 1e-12, 1e-8, 5e-5, 9.99e-5, 1.0001e-4, 2e-4, 1e-3}) {
    const Twist xi(Vec3(0.3, -0.2, 0.1), Vec3(a, -a / 2, a / 3));
    CHECK((log(exp(xi)).vector() - xi.vector()).norm() < 1e-12);
  }
  // both sides of the switch give the same rotation
  const Mat3 below = so3_exp(Vec3(0, 0, 0.99999e-4));
  const Mat3 above = so3_exp(Vec3(0, 0, 1.00001e-4));
  CHECK((below - above).norm() < 1e-8);
}

TEST_CASE("log refuses rotations within 1e-6 of pi") {
  const Pose near_pi(Rotation::about_x(kPi - 1e-7), Vec3::Zero());
  try {
    log(near_pi);
    FAIL("expected AngleNearPi");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AngleNearPi);
  }
  CHECK_NOTHROW(log(Pose(Rotation::about_x(kPi - 1e-3), Vec3::Zero())));
}

TEST_CASE("circle_dot structure") {
  const Mat46 origin = circle_dot(Vec4(0, 0, 0, 1));
  CHECK(origin.block<3, 3>(0, 0).isApprox(Mat3::Identity()));
  CHECK(origin.block<3, 3>(0, 3).isZero());
  CHECK(origin.row(3).isZero());

  const Mat46 x = circle_dot(Vec4(1, 0, 0, 1));
  CHECK((x.block<3, 3>(0, 3) + skew(Vec3(1, 0, 0))).isZero());

  // direction vectors (eta = 0) ignore translation
  const Mat46 dir = circle_dot(Vec4(0, 1, 0, 0));
  CHECK(dir.block<3, 3>(0, 0).isZero());
}

TEST_CASE("circle_dot matches central differences of exp acting on a point") {
  std::mt19937_64 gen(5);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Vec4 p;
    p << testing::random_vec(gen, 3.0), 1.0;
    const Mat46 analytic = circle_dot(p);
    Mat46 numeric;
    for (int c = 0; c < 6; ++c) {
      Vec6 d = Vec6::Zero();
      d(c) = h;
      numeric.col(c) = (exp(Twist(d)).matrix() * p - exp(Twist(Vec6(-d))).matrix() * p) / (2 * h);
    }
    worst = std::max(worst, (numeric - analytic).norm() / std::max(1.0, analytic.norm()));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("rpy_error decomposes estimate against truth") {
  std::mt19937_64 gen(9);
  const Rotation R = testing::random_pose(gen).rotation();
  CHECK(rpy_error(R, R).norm() < 1e-12);

  const Vec3 yaw = rpy_error(Rotation::about_z(deg2rad(1.0)) * R, R);
  CHECK(rad2deg(yaw.z()) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(yaw.x()) + std::abs(yaw.y()) < 1e-12);

  const Vec3 roll = rpy_error(Rotation::about_x(deg2rad(2.0)) * R, R);
  CHECK(rad2deg(roll.x()) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(roll.y()) + std::abs(roll.z()) < 1e-12);
}

TEST_CASE("to_rpy inverts from_rpy and flags gimbal lock") {
  const Vec3 rpy = to_rpy(Rotation::from_rpy(0.3, -0.4, 1.2));
  CHECK((rpy - Vec3(0.3, -0.4, 1.2)).norm() < 1e-12);
  try {
    to_rpy(Rotation::from_rpy(0.1, kPi / 2, 0.2));
    FAIL("expected GimbalLock");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GimbalLock);
  }
}

TEST_CASE("long composition chains stay orthonormal") {
  std::mt19937_64 gen(13);
  Pose chain;
  const Pose step = testing::random_pose(gen, 0.1, 0.2);
  for (int i = 0; i < 10000; ++i) {
    chain = chain * step;
    CHECK(chain.composition_depth() < 100);
  }
  const Mat3& R = chain.rotation().matrix();
  CHECK((R * R.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(R.determinant() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("row-major serialisation round trip") {
  std::mt19937_64 gen(17);
  const Pose T = testing::random_pose(gen);
  CHECK(pose_distance(Pose::from_row_major(T.to_row_major()), T) < 1e-15);
  const auto v = T.to_row_major();
  CHECK(v[3] == T.translation().x());
  CHECK(v[7] == T.translation().y());
  CHECK(v[11] == T.translation().z());
}
