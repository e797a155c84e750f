#pragma once

#include "mvo/pipeline.hpp"
#include "mvo/scene_simulator.hpp"

#include <optional>
#include <span>
#include <vector>

namespace mvo {

/// Rigid X minimising the squared distance between X * estimated[k] and
/// truth[k] over the first `n_frames` frames where both exist. Each pose
/// contributes its origin and the tips of its three unit axes, so rotation is
/// constrained even for a body spinning in place. Throws
/// Error(InsufficientOverlap) when fewer than n_frames frames overlap.
Pose calibrate_frames(std::span<const std::optional<Pose>> estimated, std::span<const std::optional<Pose>> truth,
                      int n_frames);

struct FrameError {
  int frame = 0;              // sequence frame
  Vec3 translation;           // estimate - truth, world axes, meters
  Vec3 rotation_deg;          // roll, pitch, yaw
};

struct MotionReport {
  int body = 0;               // true body id
  LabelId label = kOutlier;   // kOutlier when no label was associated
  bool camera = false;        // the camera egomotion row
  double coverage = 0.0;      // non-gap fraction of window frames
  bool calibrated = false;
  std::vector<FrameError> errors;
  double max_translation = 0.0;
  double max_rotation_deg = 0.0;
};

struct WindowReport {
  int start = 0;
  int frames = 0;
  int true_count = 0;
  int estimated_count = 0;
  bool count_correct = false;
  bool dropout = false;
  double camera_drift = 0.0;        // meters
  double camera_path_length = 0.0;  // meters
  double camera_drift_percent = 0.0;
  std::vector<MotionReport> motions;  // camera first, then bodies by id
};

struct ErrorReport {
  std::vector<WindowReport> windows;
  double model_count_fraction = 0.0;
  double coverage_fraction = 0.0;  // mean over true moving bodies and windows
  double max_camera_drift_percent = 0.0;
  double max_rotation_deg = 0.0;   // over all bodies and frames
};

struct EvaluationOptions {
  int calibration_frames = 25;
  int min_support_points = 10;  // a body counts as a motion in a window with this many tracklets
};

ErrorReport evaluate(std::span<const WindowEstimate> windows, const SceneTruth& truth,
                     const EvaluationOptions& options = {});

}  // namespace mvo
