#include "mvo/trajectory_frames.hpp"

#include <stdexcept>
#include <tuple>

namespace mvo {

const char* to_string(FrameKind kind) {
  return kind == FrameKind::Egocentric ? "egocentric" : "geocentric";
}

MotionTrajectory egocentric(const Label& label) {
  MotionTrajectory out;
  out.label = label.id;
  out.kind = FrameKind::Egocentric;
  out.poses.resize(label.poses.size());
  for (std::size_t k = 0; k < label.poses.size(); ++k) {
    if (label.poses[k]) out.poses[k] = label.poses[k]->inverse();
  }
  return out;
}

LabelId select_static_label(const Window& w, const Labeling& labeling) {
  if (labeling.labels.empty()) throw std::invalid_argument("labeling has no labels");
  // (support size desc, mean residual asc, id asc)
  std::tuple<long, double, LabelId> best{1, 0.0, 0};
  bool have = false;
  for (const Label& label : labeling.labels) {
    const std::vector<int> support = labeling.support(label.id);
    double sum = 0.0;
    int n = 0;
    for (int i : support) {
      if (const auto r = label_residual(w.intrinsics, w.tracklets[i], label)) {
        sum += *r;
        ++n;
      }
    }
    const double mean = n ? sum / n : kernels::kInfinity;
    const std::tuple<long, double, LabelId> key{-static_cast<long>(support.size()), mean, label.id};
    if (!have || key < best) {
      best = key;
      have = true;
    }
  }
  return std::get<2>(best);
}

MotionTrajectory camera_trajectory(const Window& w, const Labeling& labeling) {
  const Label& label = *labeling.find(select_static_label(w, labeling));
  MotionTrajectory out;
  out.label = label.id;
  out.kind = FrameKind::Geocentric;
  out.poses = label.poses;
  return out;
}

Vec3 center_of_motion(const Window& w, const Label& label, std::span<const int> support) {
  Vec3 sum = Vec3::Zero();
  int n = 0;
  for (int i : support) {
    const Tracklet& t = w.tracklets[i];
    for (int k = 0; k < static_cast<int>(label.poses.size()); ++k) {
      const TrackletFrame* f = t.at(k);
      if (!f || !label.poses[k]) continue;
      sum += label.poses[k]->inverse() * f->point;
      ++n;
      break;
    }
  }
  return n ? Vec3(-sum / n) : Vec3::Zero();
}

MotionTrajectory geocentric(const Label& label, const MotionTrajectory& camera, const Vec3& r) {
  MotionTrajectory out;
  out.label = label.id;
  out.kind = FrameKind::Geocentric;
  out.center = r;
  const Pose to_object = Pose::from_translation(r);
  const Pose from_object = to_object.inverse();
  out.poses.resize(label.poses.size());
  // re-reference the camera to the label's first frame so both chains start
  // at the same image
  const int s = label.first_frame();
  if (s < 0 || s >= static_cast<int>(camera.poses.size()) || !camera.poses[s]) return out;
  const Pose camera_s_inv = camera.poses[s]->inverse();
  for (std::size_t k = 0; k < label.poses.size(); ++k) {
    if (!label.poses[k] || k >= camera.poses.size() || !camera.poses[k]) continue;
    out.poses[k] = to_object * label.poses[k]->inverse() * (*camera.poses[k] * camera_s_inv) * from_object;
  }
  return out;
}

}  // namespace mvo
