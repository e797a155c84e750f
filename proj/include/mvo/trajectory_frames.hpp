#pragma once

#include "mvo/labeling.hpp"

#include <optional>
#include <span>
#include <vector>

namespace mvo {

enum class FrameKind { Egocentric, Geocentric };

const char* to_string(FrameKind kind);

struct MotionTrajectory {
  LabelId label = kOutlier;
  FrameKind kind = FrameKind::Egocentric;
  std::vector<std::optional<Pose>> poses;  // T_{l_k l_1} per window frame
  Vec3 center = Vec3::Zero();              // r, geocentric only
};

/// Per-frame inverse of the label's hypothesis.
MotionTrajectory egocentric(const Label& label);

/// Largest support; ties by lowest mean label residual, then lowest id.
/// Throws std::invalid_argument on an empty labeling.
LabelId select_static_label(const Window& w, const Labeling& labeling);

/// The static label's hypothesis as the camera motion T_{C_k C_1}.
MotionTrajectory camera_trajectory(const Window& w, const Labeling& labeling);

/// r = -mean over support of T_{C_{t_j} C_s}^-1 p_j(t_j), t_j the first frame
/// where tracklet j is observed inside the label's span.
Vec3 center_of_motion(const Window& w, const Label& label, std::span<const int> support);

/// T_{l1 C} * hyp_k^-1 * cam_k * T_{l1 C}^-1 with T_{l1 C} = [I, r], the camera
/// chain taken relative to the label's first frame. Frames
/// missing in either input are empty.
MotionTrajectory geocentric(const Label& label, const MotionTrajectory& camera, const Vec3& r);

}  // namespace mvo
