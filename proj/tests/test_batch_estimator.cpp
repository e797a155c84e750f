#include "mvo/batch_estimator.hpp"
#include "mvo/error.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace mvo;

namespace {

// Landmarks in front of a camera that drifts forward a little each frame;
// every landmark is seen in every frame.
std::pair<BatchProblem, BatchState> synthetic(std::mt19937_64& gen, int poses, int landmarks, double sigma) {
  BatchProblem pr;
  pr.sigma = 0.5;
  BatchState truth;
  truth.poses.push_back(Pose());
  for (int i = 1; i < poses; ++i) truth.poses.push_back(testing::random_pose(gen, 0.05, 0.03) * truth.poses.back());
  std::normal_distribution<double> noise(0.0, sigma);
  for (int j = 0; j < landmarks; ++j) {
    Vec3 p = testing::random_vec(gen, 1.0);
    p.z() += 4.0;
    truth.landmarks.push_back(p);
    for (int i = 0; i < poses; ++i) {
      StereoObservation y = measurement(pr.intrinsics, truth.poses[i], p);
      y.u += noise(gen);
      y.v += noise(gen);
      y.d += noise(gen);
      pr.observations.push_back({j, i, y});
    }
  }
  return {pr, truth};
}

BatchState perturbed(std::mt19937_64& gen, BatchState s, double scale) {
  for (std::size_t i = 1; i < s.poses.size(); ++i) s.poses[i] = testing::random_pose(gen, scale, scale) * s.poses[i];
  for (Vec3& p : s.landmarks) p += testing::random_vec(gen, scale);
  return s;
}

Eigen::VectorXd residual_vector(const BatchProblem& pr, const BatchState& s) {
  Eigen::VectorXd r(3 * pr.observations.size());
  for (std::size_t o = 0; o < pr.observations.size(); ++o) {
    const auto& ob = pr.observations[o];
    r.segment<3>(3 * o) = ob.y.vector() - measurement(pr.intrinsics, s.poses[ob.pose], s.landmarks[ob.landmark]).vector();
  }
  return r;
}

BatchState nudge(const BatchState& s, int index, double h) {
  BatchState out = s;
  const int F = static_cast<int>(s.poses.size()) - 1;
  if (index < 6 * F) {
    Vec6 d = Vec6::Zero();
    d(index % 6) = h;
    out.poses[index / 6 + 1] = exp(Twist(d)) * s.poses[index / 6 + 1];
  } else {
    out.landmarks[(index - 6 * F) / 3]((index - 6 * F) % 3) += h;
  }
  return out;
}

}  // namespace

TEST_CASE("measurement is the stereo projection of the transformed landmark") {
  const StereoIntrinsics K;
  const Pose T = Pose::from_translation(Vec3(0, 0, 1));
  const StereoObservation y = measurement(K, T, Vec3(0, 0, 2));
  CHECK(y.u == doctest::Approx(K.cu));
  CHECK(y.d == doctest::Approx(K.fu * K.baseline / 3));
}

TEST_CASE("measurement_jacobian matches central differences") {
  std::mt19937_64 gen(81);
  const StereoIntrinsics K;
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Pose T = testing::random_pose(gen, 0.3, 0.3);
    Vec3 p = testing::random_vec(gen, 1.0);
    p.z() += 4.0;
    const Mat39 G = measurement_jacobian(K, T, p);
    Mat39 N;
    for (int c = 0; c < 6; ++c) {
      Vec6 d = Vec6::Zero();
      d(c) = h;
      N.col(c) = (measurement(K, exp(Twist(d)) * T, p).vector() - measurement(K, exp(Twist(Vec6(-d))) * T, p).vector()) /
                 (2 * h);
    }
    for (int c = 0; c < 3; ++c) {
      Vec3 d = Vec3::Zero();
      d(c) = h;
      N.col(6 + c) = (measurement(K, T, p + d).vector() - measurement(K, T, p - d).vector()) / (2 * h);
    }
    worst = std::max(worst, (N - G).norm() / G.norm());
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("normal equations equal J^T W J and the negative cost gradient") {
  std::mt19937_64 gen(82);
  auto [pr, truth] = synthetic(gen, 4, 6, 0.5);
  const BatchState s = perturbed(gen, truth, 0.01);
  const NormalEquations ne = normal_equations(pr, s);
  const int n = static_cast<int>(ne.b.size());
  REQUIRE(n == 6 * 3 + 3 * 6);

  const double h = 1e-6;
  Eigen::MatrixXd J(3 * pr.observations.size(), n);
  Eigen::VectorXd grad(n);
  for (int c = 0; c < n; ++c) {
    const BatchState plus = nudge(s, c, h), minus = nudge(s, c, -h);
    // residual is y - g, so its derivative is -G
    J.col(c) = -(residual_vector(pr, plus) - residual_vector(pr, minus)) / (2 * h);
    grad(c) = (batch_cost(pr, plus) - batch_cost(pr, minus)) / (2 * h);
  }
  const double w = 1.0 / (pr.sigma * pr.sigma);
  const Eigen::MatrixXd A = w * J.transpose() * J;
  CHECK((A - ne.A).norm() / ne.A.norm() < 1e-5);
  CHECK((grad + ne.b).norm() / ne.b.norm() < 1e-5);
}

TEST_CASE("Schur and dense solves agree") {
  std::mt19937_64 gen(83);
  auto [pr, truth] = synthetic(gen, 5, 12, 0.5);
  const BatchState start = perturbed(gen, truth, 0.02);
  GaussNewtonOptions schur, dense;
  dense.use_schur = false;
  schur.max_iterations = dense.max_iterations = 1;
  const auto [a1, ra1] = solve(pr, start, schur);
  const auto [b1, rb1] = solve(pr, start, dense);
  for (std::size_t i = 0; i < a1.poses.size(); ++i) CHECK(testing::pose_distance(a1.poses[i], b1.poses[i]) < 1e-10);
  for (std::size_t j = 0; j < a1.landmarks.size(); ++j) CHECK((a1.landmarks[j] - b1.landmarks[j]).norm() < 1e-10);

  // iteration counts may differ by one where round-off meets the step tolerance
  schur.max_iterations = dense.max_iterations = 50;
  const auto [a, ra] = solve(pr, start, schur);
  const auto [b, rb] = solve(pr, start, dense);
  CHECK(ra.final_cost == doctest::Approx(rb.final_cost).epsilon(1e-8));
  for (std::size_t i = 0; i < a.poses.size(); ++i) CHECK(testing::pose_distance(a.poses[i], b.poses[i]) < 1e-8);
  for (std::size_t j = 0; j < a.landmarks.size(); ++j) CHECK((a.landmarks[j] - b.landmarks[j]).norm() < 1e-8);
}

TEST_CASE("noise-free problems converge to zero cost") {
  std::mt19937_64 gen(84);
  auto [pr, truth] = synthetic(gen, 6, 15, 0.0);
  const auto [s, r] = solve(pr, perturbed(gen, truth, 0.01));
  CHECK(r.converged);
  CHECK(r.final_cost < 1e-12);
  CHECK(r.final_cost < r.initial_cost);
  for (std::size_t i = 0; i < s.poses.size(); ++i) CHECK(testing::pose_distance(s.poses[i], truth.poses[i]) < 1e-6);
}

TEST_CASE("noisy problems reduce the cost and stop at a stationary point") {
  std::mt19937_64 gen(85);
  auto [pr, truth] = synthetic(gen, 6, 20, 0.5);
  const auto [s, r] = solve(pr, perturbed(gen, truth, 0.01));
  CHECK(r.converged);
  CHECK(r.final_cost <= r.initial_cost);
  CHECK(r.gradient_norm < 1e-3);
}

TEST_CASE("underconstrained problems are rank deficient") {
  std::mt19937_64 gen(86);
  auto [pr, truth] = synthetic(gen, 3, 5, 0.0);
  BatchProblem lonely = pr;
  lonely.observations.erase(lonely.observations.begin() + 1, lonely.observations.begin() + 3);  // landmark 0 seen once
  CHECK_THROWS_AS(solve(lonely, truth), Error);

  auto [pr2, truth2] = synthetic(gen, 3, 2, 0.0);
  try {
    solve(pr2, truth2);
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("label initialisation on a noise-free scene is already optimal") {
  const SceneConfig cfg = testing::single_block(true, 0.0);
  const Scene scene = generate_scene(cfg, 8);
  const Window w = make_window(cfg.intrinsics, scene.tracklets, 0, cfg.frames);
  Label l;
  for (int k = 0; k < cfg.frames; ++k) l.poses.push_back(scene.truth.body_hypothesis(0, k, 0));
  std::vector<int> support;
  for (int i = 0; i < static_cast<int>(w.tracklets.size()); ++i) support.push_back(i);

  const LabelBatch b = initialize_from_label(w, l, support, 0.5);
  CHECK(b.first_frame == 0);
  CHECK(b.pruned.empty());
  CHECK(b.state.landmarks.size() == support.size());
  CHECK(batch_cost(b.problem, b.state) < 1e-12);

  const RefinedLabel r = refine_label(w, l, support, 0.5);
  CHECK(r.solved);
  CHECK(r.report.iterations <= 2);
  CHECK(r.report.final_cost < 1e-12);
}
