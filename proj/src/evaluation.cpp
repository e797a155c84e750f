#include "mvo/evaluation.hpp"

#include "mvo/error.hpp"
#include "mvo/rigid_alignment.hpp"

#include <algorithm>
#include <map>

namespace mvo {

namespace {

void push_frame_points(const Pose& T, std::vector<Vec3>& out) {
  out.push_back(T.translation());
  for (int a = 0; a < 3; ++a) out.push_back(T.translation() + T.rotation().matrix().col(a));
}

// Calibrates, then fills per-frame errors; leaves `m.calibrated` false when
// there is too little overlap.
void score_motion(MotionReport& m, std::span<const std::optional<Pose>> est, std::span<const std::optional<Pose>> truth,
                  int start, int calibration_frames) {
  Pose X;
  try {
    X = calibrate_frames(est, truth, calibration_frames);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientOverlap) throw;
    return;
  }
  m.calibrated = true;
  for (std::size_t k = 0; k < est.size(); ++k) {
    if (!est[k] || !truth[k]) continue;
    const Pose world = X * *est[k];
    FrameError fe;
    fe.frame = start + static_cast<int>(k);
    fe.translation = world.translation() - truth[k]->translation();
    const Vec3 rpy = rpy_error(world.rotation(), truth[k]->rotation());
    fe.rotation_deg = Vec3(rad2deg(rpy.x()), rad2deg(rpy.y()), rad2deg(rpy.z()));
    m.max_translation = std::max(m.max_translation, fe.translation.norm());
    m.max_rotation_deg = std::max(m.max_rotation_deg, fe.rotation_deg.cwiseAbs().maxCoeff());
    m.errors.push_back(fe);
  }
}

double coverage_of(const std::vector<std::optional<Pose>>& poses, int frames) {
  const auto n = std::count_if(poses.begin(), poses.end(), [](const auto& p) { return p.has_value(); });
  return frames > 0 ? static_cast<double>(n) / frames : 0.0;
}

}  // namespace

Pose calibrate_frames(std::span<const std::optional<Pose>> estimated, std::span<const std::optional<Pose>> truth,
                      int n_frames) {
  std::vector<Vec3> src, dst;
  int used = 0;
  for (std::size_t k = 0; k < std::min(estimated.size(), truth.size()) && used < n_frames; ++k) {
    if (!estimated[k] || !truth[k]) continue;
    push_frame_points(*estimated[k], src);
    push_frame_points(*truth[k], dst);
    ++used;
  }
  if (used < n_frames || used == 0) {
    throw Error(ErrorCode::InsufficientOverlap,
                std::to_string(used) + " overlapping frames, " + std::to_string(n_frames) + " required");
  }
  return align_point_sets(src, dst);
}

ErrorReport evaluate(std::span<const WindowEstimate> windows, const SceneTruth& truth,
                     const EvaluationOptions& options) {
  ErrorReport report;
  int correct = 0;
  double coverage_sum = 0.0;
  int coverage_n = 0;

  for (const WindowEstimate& we : windows) {
    WindowReport wr;
    wr.start = we.start;
    wr.frames = we.frames;
    wr.dropout = we.dropout;
    wr.estimated_count = static_cast<int>(we.labels.size());

    std::map<int, int> per_body;
    std::map<TrackletId, LabelId> label_of;
    for (const auto& [id, label] : we.assignment) {
      label_of[id] = label;
      if (auto it = truth.assignment.find(id); it != truth.assignment.end()) ++per_body[it->second];
    }
    std::vector<int> motions;
    for (const auto& [body, n] : per_body) {
      if (n >= options.min_support_points) motions.push_back(body);
    }
    wr.true_count = static_cast<int>(motions.size());
    wr.count_correct = !we.dropout && wr.true_count == wr.estimated_count;
    correct += wr.count_correct;

    // majority vote: label -> body, then best label per body
    std::map<int, std::pair<int, LabelId>> best_for_body;  // body -> (votes, label)
    for (const LabelEstimate& le : we.labels) {
      std::map<int, int> votes;
      for (TrackletId id : le.support) {
        if (auto it = truth.assignment.find(id); it != truth.assignment.end()) ++votes[it->second];
      }
      if (votes.empty()) continue;
      auto top = std::max_element(votes.begin(), votes.end(), [](const auto& a, const auto& b) {
        return a.second < b.second || (a.second == b.second && a.first > b.first);
      });
      auto& slot = best_for_body[top->first];
      if (top->second > slot.first || (top->second == slot.first && le.id < slot.second)) {
        slot = {top->second, le.id};
      }
    }
    auto find_label = [&](LabelId id) -> const LabelEstimate* {
      for (const LabelEstimate& le : we.labels) {
        if (le.id == id) return &le;
      }
      return nullptr;
    };

    // camera
    MotionReport cam;
    cam.camera = true;
    cam.body = 0;
    std::vector<std::optional<Pose>> cam_truth(we.frames);
    for (int k = 0; k < we.frames; ++k) cam_truth[k] = truth.camera[we.start + k].inverse();
    for (int k = 1; k < we.frames; ++k) {
      wr.camera_path_length += (cam_truth[k]->translation() - cam_truth[k - 1]->translation()).norm();
    }
    if (const LabelEstimate* st = find_label(we.static_label)) {
      cam.label = st->id;
      std::vector<std::optional<Pose>> est(we.frames);
      for (int k = 0; k < we.frames; ++k) {
        if (st->hypothesis[k]) est[k] = st->hypothesis[k]->inverse();
      }
      cam.coverage = coverage_of(est, we.frames);
      score_motion(cam, est, cam_truth, we.start, options.calibration_frames);
      wr.camera_drift = cam.max_translation;
      wr.camera_drift_percent = wr.camera_path_length > 0 ? 100.0 * wr.camera_drift / wr.camera_path_length : 0.0;
    }
    report.max_camera_drift_percent = std::max(report.max_camera_drift_percent, wr.camera_drift_percent);
    wr.motions.push_back(std::move(cam));

    for (int body : motions) {
      if (body == 0) continue;
      MotionReport m;
      m.body = body;
      auto hit = best_for_body.find(body);
      const LabelEstimate* le = hit == best_for_body.end() ? nullptr : find_label(hit->second.second);
      if (le) {
        m.label = le->id;
        m.coverage = coverage_of(le->geocentric, we.frames);
        int s = 0;
        while (s < we.frames && !le->hypothesis[s]) ++s;
        if (s < we.frames) {
          const RigidBody& rb = *std::find_if(truth.bodies.begin(), truth.bodies.end(),
                                              [&](const RigidBody& b) { return b.id == body; });
          const Pose anchor = rb.trajectory[we.start + s].inverse() * truth.camera[we.start + s].inverse() *
                              Pose::from_translation(-le->center);
          std::vector<std::optional<Pose>> est(we.frames), tru(we.frames);
          for (int k = 0; k < we.frames; ++k) {
            if (le->geocentric[k]) est[k] = le->geocentric[k]->inverse();
            tru[k] = rb.trajectory[we.start + k] * anchor;
          }
          score_motion(m, est, tru, we.start, options.calibration_frames);
          if (m.calibrated) report.max_rotation_deg = std::max(report.max_rotation_deg, m.max_rotation_deg);
        }
      }
      coverage_sum += m.coverage;
      ++coverage_n;
      wr.motions.push_back(std::move(m));
    }
    report.windows.push_back(std::move(wr));
  }
  report.model_count_fraction = windows.empty() ? 0.0 : static_cast<double>(correct) / windows.size();
  report.coverage_fraction = coverage_n ? coverage_sum / coverage_n : 0.0;
  return report;
}

}  // namespace mvo
