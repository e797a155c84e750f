#pragma once

// Data-parallel inner loops of the pipeline. Each kernel has a serial
// reference and an OpenMP version; the two must agree bit-for-bit (every
// output element is computed by exactly one thread, no reductions).

#include "mvo/se3.hpp"
#include "mvo/stereo_camera.hpp"
#include "mvo/tracklet.hpp"

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace mvo::kernels {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Frame-to-frame motions of one hypothesis: steps[k] = T_{C_k C_{k-1}},
/// steps[0] is always empty.
using StepChain = std::vector<std::optional<Pose>>;

/// Image distance between the (u,v) of obs at frame k and the projection of
/// `step * previous_point`. Infinite if the transformed point is behind the
/// camera.
inline double transfer_error(const StereoIntrinsics& K, const Pose& step, const Vec3& previous_point,
                             const StereoObservation& obs) {
  const Vec3 q = step * previous_point;
  if (q.z() <= 1e-6) return kInfinity;
  const Eigen::Vector2d uv = project_uv(K, q);
  return std::hypot(obs.u - uv.x(), obs.v - uv.y());
}

/// Max transfer error over frames where the tracklet is observed at k-1 and k
/// and the chain has a step at k. Empty if there is no such frame.
std::optional<double> max_transfer_error(const StereoIntrinsics& K, const Tracklet& t, const StepChain& steps);

/// Max over co-observed frames of the (u,v) distance; infinite if the two
/// tracklets never coexist.
double tracklet_distance(const Tracklet& p, const Tracklet& q);

struct Neighbor {
  int index = 0;
  double distance = 0.0;
};

/// For every tracklet, its k nearest finite-distance neighbours ordered by
/// (distance, id).
std::vector<std::vector<Neighbor>> nearest_neighbors_serial(std::span<const Tracklet> tracklets, int k);
std::vector<std::vector<Neighbor>> nearest_neighbors_parallel(std::span<const Tracklet> tracklets, int k);

/// Row-major |tracklets| x |chains| table of max_transfer_error, infinite where
/// there is no overlap.
std::vector<double> residual_matrix_serial(const StereoIntrinsics& K, std::span<const Tracklet> tracklets,
                                           std::span<const StepChain> chains);
std::vector<double> residual_matrix_parallel(const StereoIntrinsics& K, std::span<const Tracklet> tracklets,
                                             std::span<const StepChain> chains);

/// Correspondences co-observed in one frame pair: back-projection at k-1 and
/// the observation at k.
struct FramePairData {
  std::vector<Vec3> previous_points;
  std::vector<Vec3> current_points;
  std::vector<StereoObservation> current_obs;

  std::size_t size() const { return previous_points.size(); }
};

/// Inlier count (transfer error < threshold) for each hypothesis.
std::vector<int> score_hypotheses_serial(const StereoIntrinsics& K, const FramePairData& data,
                                         std::span<const Pose> hypotheses, double threshold);
std::vector<int> score_hypotheses_parallel(const StereoIntrinsics& K, const FramePairData& data,
                                           std::span<const Pose> hypotheses, double threshold);

}  // namespace mvo::kernels
