#pragma once

#include "mvo/labeling.hpp"
#include "mvo/se3.hpp"
#include "mvo/stereo_camera.hpp"

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace mvo {

struct BatchObservation {
  int landmark = 0;
  int pose = 0;  // index into BatchState::poses
  StereoObservation y;
};

/// poses[i] = T_{C_{s+i} C_s} for the label's first frame s, poses[0] fixed to
/// identity. Landmarks are expressed in C_s.
struct BatchState {
  std::vector<Pose> poses;
  std::vector<Vec3> landmarks;
};

struct BatchProblem {
  StereoIntrinsics intrinsics;
  std::vector<BatchObservation> observations;
  double sigma = 0.5;  // pixels, isotropic in (u, v, d)
};

struct GaussNewtonOptions {
  int max_iterations = 50;
  double step_tolerance = 1e-8;
  bool use_schur = true;  // false: dense solve of the full normal equations
};

struct GaussNewtonReport {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  bool converged = false;
  double gradient_norm = 0.0;
};

using Mat39 = Eigen::Matrix<double, 3, 9>;

/// s(T * p).
StereoObservation measurement(const StereoIntrinsics& K, const Pose& T, const Vec3& landmark);

/// [S (T p)^circledot | S C]: columns 0-5 for a left twist perturbation of T,
/// columns 6-8 for an additive landmark perturbation.
Mat39 measurement_jacobian(const StereoIntrinsics& K, const Pose& T, const Vec3& landmark);

/// J = 1/2 sum e^T R^-1 e.
double batch_cost(const BatchProblem& problem, const BatchState& state);

/// Full normal equations A dx = b over [poses 1.. (6 each), landmarks (3 each)].
struct NormalEquations {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};
NormalEquations normal_equations(const BatchProblem& problem, const BatchState& state);

/// Gauss-Newton with left-multiplied pose updates. Throws Error(RankDeficient)
/// when a landmark has fewer than 2 observations, a free pose fewer than 3
/// landmarks, or the reduced system cannot be factorised.
std::pair<BatchState, GaussNewtonReport> solve(const BatchProblem& problem, const BatchState& initial,
                                               const GaussNewtonOptions& options = {});

/// A label's bundle-adjustment problem over its span. Tracklets that cannot
/// be constrained (fewer than 2 observations in the span) are listed in
/// `pruned` and carry no landmark.
struct LabelBatch {
  int first_frame = 0;
  BatchProblem problem;
  BatchState state;
  std::vector<int> tracklets;  // window tracklet index per landmark
  std::vector<int> pruned;
};

/// Poses from the label's chain; landmark j is the back-projection at its
/// first observed frame t_j moved into C_s by T_{C_{t_j} C_s}^-1.
LabelBatch initialize_from_label(const Window& w, const Label& label, std::span<const int> support, double sigma);

struct RefinedLabel {
  Label label;
  GaussNewtonReport report;
  bool solved = false;        // false: the RANSAC chain was kept
  std::vector<int> pruned;    // tracklets to move to O
};

/// Batch solve seeded from the label; the refined poses replace the label's.
RefinedLabel refine_label(const Window& w, const Label& label, std::span<const int> support, double sigma,
                          const GaussNewtonOptions& options = {});

}  // namespace mvo
