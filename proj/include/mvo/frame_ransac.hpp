#pragma once

#include "mvo/kernels.hpp"
#include "mvo/labeling.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mvo {

/// True if the triple is too close to collinear (or coincident) to define a
/// rigid transform: smallest pairwise distance or smallest triangle altitude
/// below 1e-3 m.
bool degenerate_triple(const Vec3& a, const Vec3& b, const Vec3& c);

struct FrameTransformEstimate {
  Pose transform;     // T_{C_k C_{k-1}}
  int inliers = 0;
};

/// RANSAC over one frame pair: draws up to `iterations` 3-point samples in
/// batches, stopping early once the best model's inlier ratio gives 99.99%
/// confidence of having drawn an all-inlier sample. Scores by transfer error
/// < threshold, then refits the best model on its inliers.
/// Empty when fewer than 3 correspondences or no non-degenerate sample.
std::optional<FrameTransformEstimate> ransac_frame_pair(const StereoIntrinsics& K,
                                                        const kernels::FramePairData& data, int iterations,
                                                        double threshold, std::uint64_t key);

struct MotionEstimate {
  Label label;                 // id left at 0
  std::vector<int> inliers;    // tracklet indices with residual < threshold
  std::vector<int> outliers;   // remainder of the subset
};

/// Frame-to-frame RANSAC across the window on the given tracklet subset,
/// chaining per-pair transforms into a trajectory. A frame pair without a
/// model breaks the chain; the longest unbroken run is kept. Empty if no frame
/// pair produced a model.
std::optional<MotionEstimate> estimate_motion(const Window& w, std::span<const int> subset,
                                              const EnergyParams& params, std::uint64_t key);

}  // namespace mvo
