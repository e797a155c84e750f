#include "mvo/batch_estimator.hpp"

#include "mvo/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace mvo {

namespace {

using Mat36 = Eigen::Matrix<double, 3, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

constexpr int kMaxDampingTries = 10;

// Per-observation and per-block pieces of A and b. Poses interact with each
// other only through landmarks, so the pose-pose part of A is block diagonal.
struct Linearization {
  int free_poses = 0;
  std::vector<Mat6> Hpp;
  std::vector<Vec6> bp;
  std::vector<Mat3> Hll;
  std::vector<Vec3> bl;
  std::vector<Mat63> Hpl;  // per observation
  double cost = 0.0;
};

Linearization linearize(const BatchProblem& pr, const BatchState& s) {
  const int F = static_cast<int>(s.poses.size()) - 1;
  const int M = static_cast<int>(s.landmarks.size());
  const double w = 1.0 / (pr.sigma * pr.sigma);
  Linearization lin;
  lin.free_poses = F;
  lin.Hpp.assign(F, Mat6::Zero());
  lin.bp.assign(F, Vec6::Zero());
  lin.Hll.assign(M, Mat3::Zero());
  lin.bl.assign(M, Vec3::Zero());
  lin.Hpl.assign(pr.observations.size(), Mat63::Zero());
  for (std::size_t o = 0; o < pr.observations.size(); ++o) {
    const BatchObservation& ob = pr.observations[o];
    const Pose& T = s.poses[ob.pose];
    const Vec3& p = s.landmarks[ob.landmark];
    const Vec3 e = ob.y.vector() - measurement(pr.intrinsics, T, p).vector();
    lin.cost += 0.5 * w * e.squaredNorm();
    const Mat39 G = measurement_jacobian(pr.intrinsics, T, p);
    const Mat36 Gp = G.leftCols<6>();
    const Mat3 Gl = G.rightCols<3>();
    lin.Hll[ob.landmark] += w * Gl.transpose() * Gl;
    lin.bl[ob.landmark] += w * Gl.transpose() * e;
    if (ob.pose > 0) {
      const int i = ob.pose - 1;
      lin.Hpp[i] += w * Gp.transpose() * Gp;
      lin.bp[i] += w * Gp.transpose() * e;
      lin.Hpl[o] = w * Gp.transpose() * Gl;
    }
  }
  return lin;
}

double gradient_norm(const Linearization& lin) {
  double sq = 0.0;
  for (const Vec6& v : lin.bp) sq += v.squaredNorm();
  for (const Vec3& v : lin.bl) sq += v.squaredNorm();
  return std::sqrt(sq);
}

NormalEquations assemble(const Linearization& lin, const BatchProblem& pr) {
  const int F = lin.free_poses;
  const int M = static_cast<int>(lin.Hll.size());
  const int n = 6 * F + 3 * M;
  NormalEquations ne{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
  for (int i = 0; i < F; ++i) {
    ne.A.block<6, 6>(6 * i, 6 * i) = lin.Hpp[i];
    ne.b.segment<6>(6 * i) = lin.bp[i];
  }
  for (int j = 0; j < M; ++j) {
    ne.A.block<3, 3>(6 * F + 3 * j, 6 * F + 3 * j) = lin.Hll[j];
    ne.b.segment<3>(6 * F + 3 * j) = lin.bl[j];
  }
  for (std::size_t o = 0; o < pr.observations.size(); ++o) {
    const BatchObservation& ob = pr.observations[o];
    if (ob.pose == 0) continue;
    const int r = 6 * (ob.pose - 1), c = 6 * F + 3 * ob.landmark;
    ne.A.block<6, 3>(r, c) += lin.Hpl[o];
    ne.A.block<3, 6>(c, r) += lin.Hpl[o].transpose();
  }
  return ne;
}

Eigen::VectorXd solve_dense(const Linearization& lin, const BatchProblem& pr, double mu) {
  NormalEquations ne = assemble(lin, pr);
  if (mu > 0) ne.A.diagonal() *= 1.0 + mu;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(ne.A);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw Error(ErrorCode::RankDeficient, "normal equations are not positive definite");
  }
  Eigen::VectorXd dx = ldlt.solve(ne.b);
  if (!dx.allFinite()) throw Error(ErrorCode::RankDeficient, "normal equations are singular");
  return dx;
}

// Eliminates landmarks (3x3 blocks), solves the pose system densely, then
// back-substitutes.
Eigen::VectorXd solve_schur(const Linearization& lin, const BatchProblem& pr,
                            const std::vector<std::vector<int>>& obs_of_landmark, double mu) {
  const int F = lin.free_poses;
  const int M = static_cast<int>(lin.Hll.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(6 * F, 6 * F);
  Eigen::VectorXd rhs(6 * F);
  for (int i = 0; i < F; ++i) {
    Mat6 h = lin.Hpp[i];
    if (mu > 0) h.diagonal() *= 1.0 + mu;
    S.block<6, 6>(6 * i, 6 * i) = h;
    rhs.segment<6>(6 * i) = lin.bp[i];
  }

  std::vector<Mat3> inv(M);
  for (int j = 0; j < M; ++j) {
    Mat3 h = lin.Hll[j];
    if (mu > 0) h.diagonal() *= 1.0 + mu;
    Eigen::LDLT<Mat3> ldlt(h);
    // relative pivot test: a landmark block this close to singular is
    // unobservable, not merely badly scaled
    const double scale = std::max(h.diagonal().maxCoeff(), 1e-300);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12 * scale) {
      throw Error(ErrorCode::RankDeficient, "landmark block is singular");
    }
    inv[j] = ldlt.solve(Mat3::Identity());
    const std::vector<int>& obs = obs_of_landmark[j];
    for (int a : obs) {
      const int pa = pr.observations[a].pose;
      if (pa == 0) continue;
      const Mat63 Wa = lin.Hpl[a] * inv[j];
      rhs.segment<6>(6 * (pa - 1)) -= Wa * lin.bl[j];
      for (int b : obs) {
        const int pb = pr.observations[b].pose;
        if (pb == 0) continue;
        S.block<6, 6>(6 * (pa - 1), 6 * (pb - 1)).noalias() -= Wa * lin.Hpl[b].transpose();
      }
    }
  }

  Eigen::VectorXd dp;
  if (F > 0) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw Error(ErrorCode::RankDeficient, "reduced pose system is not positive definite");
    }
    dp = ldlt.solve(rhs);
    if (!dp.allFinite()) throw Error(ErrorCode::RankDeficient, "reduced pose system is singular");
  } else {
    dp.resize(0);
  }

  Eigen::VectorXd dx(6 * F + 3 * M);
  dx.head(6 * F) = dp;
  for (int j = 0; j < M; ++j) {
    Vec3 r = lin.bl[j];
    for (int a : obs_of_landmark[j]) {
      const int pa = pr.observations[a].pose;
      if (pa > 0) r -= lin.Hpl[a].transpose() * dp.segment<6>(6 * (pa - 1));
    }
    dx.segment<3>(6 * F + 3 * j) = inv[j] * r;
  }
  return dx;
}

BatchState apply(const BatchState& s, const Eigen::VectorXd& dx) {
  BatchState out = s;
  const int F = static_cast<int>(s.poses.size()) - 1;
  for (int i = 0; i < F; ++i) {
    out.poses[i + 1] = exp(Twist(Vec6(dx.segment<6>(6 * i)))) * s.poses[i + 1];
  }
  for (std::size_t j = 0; j < s.landmarks.size(); ++j) out.landmarks[j] += dx.segment<3>(6 * F + 3 * j);
  return out;
}

double safe_cost(const BatchProblem& pr, const BatchState& s) {
  try {
    return batch_cost(pr, s);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

void check_structure(const BatchProblem& pr, const BatchState& s) {
  std::vector<int> per_landmark(s.landmarks.size(), 0);
  std::vector<std::vector<int>> per_pose(s.poses.size());
  for (const BatchObservation& ob : pr.observations) {
    ++per_landmark[ob.landmark];
    per_pose[ob.pose].push_back(ob.landmark);
  }
  for (std::size_t j = 0; j < per_landmark.size(); ++j) {
    if (per_landmark[j] < 2) {
      throw Error(ErrorCode::RankDeficient, "landmark " + std::to_string(j) + " has fewer than 2 observations");
    }
  }
  for (std::size_t i = 1; i < per_pose.size(); ++i) {
    std::sort(per_pose[i].begin(), per_pose[i].end());
    const auto distinct = std::unique(per_pose[i].begin(), per_pose[i].end()) - per_pose[i].begin();
    if (distinct < 3) {
      throw Error(ErrorCode::RankDeficient, "pose " + std::to_string(i) + " sees fewer than 3 landmarks");
    }
  }
}

}  // namespace

StereoObservation measurement(const StereoIntrinsics& K, const Pose& T, const Vec3& landmark) {
  return project(K, T * landmark);
}

Mat39 measurement_jacobian(const StereoIntrinsics& K, const Pose& T, const Vec3& landmark) {
  const Vec3 q = T * landmark;
  const Mat3 S = projection_jacobian(K, q);
  Vec4 h;
  h << q, 1.0;
  Mat39 G;
  G.leftCols<6>() = S * circle_dot(h).topRows<3>();
  G.rightCols<3>() = S * T.rotation().matrix();
  return G;
}

double batch_cost(const BatchProblem& problem, const BatchState& state) {
  const double w = 1.0 / (problem.sigma * problem.sigma);
  double J = 0.0;
  for (const BatchObservation& ob : problem.observations) {
    const Vec3 e =
        ob.y.vector() - measurement(problem.intrinsics, state.poses[ob.pose], state.landmarks[ob.landmark]).vector();
    J += 0.5 * w * e.squaredNorm();
  }
  return J;
}

NormalEquations normal_equations(const BatchProblem& problem, const BatchState& state) {
  return assemble(linearize(problem, state), problem);
}

std::pair<BatchState, GaussNewtonReport> solve(const BatchProblem& problem, const BatchState& initial,
                                               const GaussNewtonOptions& options) {
  if (initial.poses.empty()) throw Error(ErrorCode::RankDeficient, "no poses");
  check_structure(problem, initial);

  std::vector<std::vector<int>> obs_of_landmark(initial.landmarks.size());
  for (std::size_t o = 0; o < problem.observations.size(); ++o) {
    obs_of_landmark[problem.observations[o].landmark].push_back(static_cast<int>(o));
  }
  auto step = [&](const Linearization& lin, double mu) {
    return options.use_schur ? solve_schur(lin, problem, obs_of_landmark, mu) : solve_dense(lin, problem, mu);
  };

  BatchState state = initial;
  state.poses[0] = Pose::identity();
  GaussNewtonReport report;
  Linearization lin = linearize(problem, state);
  report.initial_cost = lin.cost;

  for (int it = 0; it < options.max_iterations; ++it) {
    Eigen::VectorXd dx = step(lin, 0.0);
    BatchState next = apply(state, dx);
    double cost = safe_cost(problem, next);
    // damping only when the plain step makes things worse
    double mu = 1e-4;
    for (int tries = 0; cost > lin.cost && tries < kMaxDampingTries; ++tries, mu *= 10.0) {
      dx = step(lin, mu);
      next = apply(state, dx);
      cost = safe_cost(problem, next);
    }
    if (cost > lin.cost) {
      report.converged = dx.norm() < options.step_tolerance;
      break;
    }
    state = std::move(next);
    ++report.iterations;
    lin = linearize(problem, state);
    if (dx.norm() < options.step_tolerance) {
      report.converged = true;
      break;
    }
  }
  report.final_cost = lin.cost;
  report.gradient_norm = gradient_norm(lin);
  return {std::move(state), report};
}

LabelBatch initialize_from_label(const Window& w, const Label& label, std::span<const int> support, double sigma) {
  LabelBatch out;
  int first = label.first_frame(), last = label.last_frame();
  std::vector<int> kept(support.begin(), support.end());

  // trim the span from either end until every end pose sees 3 constrained
  // landmarks; drop tracklets with fewer than 2 observations inside the span
  for (bool changed = true; changed && first >= 0 && first <= last;) {
    changed = false;
    std::vector<int> next;
    for (int i : kept) {
      int n = 0;
      for (int k = first; k <= last; ++k) n += w.tracklets[i].observed(k);
      if (n >= 2) {
        next.push_back(i);
      } else {
        out.pruned.push_back(i);
        changed = true;
      }
    }
    kept = std::move(next);
    auto seen_by = [&](int k) {
      int n = 0;
      for (int i : kept) n += w.tracklets[i].observed(k);
      return n;
    };
    while (first <= last && seen_by(first) < 3) {
      ++first;
      changed = true;
    }
    while (last >= first && seen_by(last) < 3) {
      --last;
      changed = true;
    }
  }
  std::sort(out.pruned.begin(), out.pruned.end());
  out.first_frame = first;
  out.problem.intrinsics = w.intrinsics;
  out.problem.sigma = sigma;
  if (first < 0 || first > last) {
    out.pruned.insert(out.pruned.end(), kept.begin(), kept.end());
    std::sort(out.pruned.begin(), out.pruned.end());
    return out;
  }

  const Pose rebase = label.poses[first]->inverse();
  for (int k = first; k <= last; ++k) out.state.poses.push_back(*label.poses[k] * rebase);
  out.state.poses[0] = Pose::identity();

  for (int i : kept) {
    const Tracklet& t = w.tracklets[i];
    const int j = static_cast<int>(out.state.landmarks.size());
    int tj = -1;
    for (int k = first; k <= last; ++k) {
      const TrackletFrame* f = t.at(k);
      if (!f) continue;
      if (tj < 0) tj = k;
      out.problem.observations.push_back({j, k - first, f->obs});
    }
    out.state.landmarks.push_back(out.state.poses[tj - first].inverse() * t.at(tj)->point);
    out.tracklets.push_back(i);
  }
  return out;
}

RefinedLabel refine_label(const Window& w, const Label& label, std::span<const int> support, double sigma,
                          const GaussNewtonOptions& options) {
  RefinedLabel out;
  out.label = label;
  LabelBatch batch = initialize_from_label(w, label, support, sigma);
  if (batch.state.poses.empty()) return out;
  try {
    auto [state, report] = solve(batch.problem, batch.state, options);
    out.report = report;
    out.solved = true;
    out.pruned = batch.pruned;
    out.label.poses.assign(label.poses.size(), std::nullopt);
    for (std::size_t i = 0; i < state.poses.size(); ++i) out.label.poses[batch.first_frame + i] = state.poses[i];
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankDeficient) throw;
  }
  return out;
}

}  // namespace mvo
