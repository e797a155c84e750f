#include "mvo/dump_io.hpp"

#include "mvo/error.hpp"

#include <cstdio>
#include <ostream>

namespace mvo {

using nlohmann::json;

namespace {

json poses_to_json(const std::vector<std::optional<Pose>>& poses) {
  json a = json::array();
  for (const auto& p : poses) a.push_back(pose_to_json(p));
  return a;
}

std::vector<std::optional<Pose>> poses_from_json(const json& j) {
  std::vector<std::optional<Pose>> out;
  for (const json& p : j) out.push_back(pose_from_json(p));
  return out;
}

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Fixed-precision number for the CSV files; %.17g round-trips a double.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_pose_row(std::ostream& out, int frame, const std::optional<Pose>& p, const char* kind, LabelId id) {
  out << frame;
  if (p) {
    for (double v : p->to_row_major()) out << ',' << num(v);
  } else {
    for (int i = 0; i < 12; ++i) out << ',';
  }
  out << ',' << kind << ',' << id << '\n';
}

}  // namespace

json pose_to_json(const std::optional<Pose>& pose) {
  if (!pose) return nullptr;
  json a = json::array();
  for (double v : pose->to_row_major()) a.push_back(v);
  return a;
}

std::optional<Pose> pose_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 12) throw Error(ErrorCode::ParseError, "pose must be 12 numbers or null");
  std::array<double, 12> v{};
  for (int i = 0; i < 12; ++i) v[i] = j[i].get<double>();
  return Pose::from_row_major(v);
}

json window_to_json(const WindowEstimate& w) {
  json labels = json::array();
  for (const LabelEstimate& l : w.labels) {
    int first = -1, last = -1;
    for (int k = 0; k < static_cast<int>(l.hypothesis.size()); ++k) {
      if (!l.hypothesis[k]) continue;
      if (first < 0) first = k;
      last = k;
    }
    json batch = nullptr;
    if (l.batch) {
      batch = {{"iterations", l.batch->iterations},
               {"initial_cost", l.batch->initial_cost},
               {"final_cost", l.batch->final_cost},
               {"converged", l.batch->converged},
               {"gradient_norm", l.batch->gradient_norm}};
    }
    labels.push_back({{"id", l.id},
                      {"span", json::array({first, last})},
                      {"poses", poses_to_json(l.hypothesis)},
                      {"geocentric", poses_to_json(l.geocentric)},
                      {"center", vec_to_json(l.center)},
                      {"support", l.support},
                      {"batch", batch}});
  }
  json assignment = json::array();
  for (const auto& [id, label] : w.assignment) assignment.push_back(json::array({id, label}));
  return {{"start", w.start},
          {"frames", w.frames},
          {"dropout", w.dropout},
          {"failure", w.failure},
          {"static_label", w.static_label},
          {"labels", labels},
          {"assignment", assignment}};
}

WindowEstimate window_from_json(const json& j) {
  try {
    WindowEstimate w;
    w.start = j.at("start").get<int>();
    w.frames = j.at("frames").get<int>();
    w.dropout = j.at("dropout").get<bool>();
    w.failure = j.at("failure").get<std::string>();
    w.static_label = j.at("static_label").get<LabelId>();
    for (const json& l : j.at("labels")) {
      LabelEstimate e;
      e.id = l.at("id").get<LabelId>();
      e.hypothesis = poses_from_json(l.at("poses"));
      e.geocentric = poses_from_json(l.at("geocentric"));
      const json& c = l.at("center");
      e.center = Vec3(c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>());
      e.support = l.at("support").get<std::vector<TrackletId>>();
      if (const json& b = l.at("batch"); !b.is_null()) {
        GaussNewtonReport r;
        r.iterations = b.at("iterations").get<int>();
        r.initial_cost = b.at("initial_cost").get<double>();
        r.final_cost = b.at("final_cost").get<double>();
        r.converged = b.at("converged").get<bool>();
        r.gradient_norm = b.at("gradient_norm").get<double>();
        e.batch = r;
      }
      if (static_cast<int>(e.hypothesis.size()) != w.frames || static_cast<int>(e.geocentric.size()) != w.frames) {
        throw Error(ErrorCode::ParseError, "label " + std::to_string(e.id) + " pose count differs from frames");
      }
      w.labels.push_back(std::move(e));
    }
    for (const json& a : j.at("assignment")) w.assignment.push_back({a.at(0).get<TrackletId>(), a.at(1).get<LabelId>()});
    return w;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("labeling dump: ") + e.what());
  }
}

void write_trajectory_csv(std::ostream& out, const WindowEstimate& w) {
  out << "frame";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) out << ",r" << r << c;
  }
  out << ",kind,label\n";
  for (const LabelEstimate& l : w.labels) {
    for (int k = 0; k < w.frames; ++k) {
      std::optional<Pose> ego;
      if (l.hypothesis[k]) ego = l.hypothesis[k]->inverse();
      write_pose_row(out, w.start + k, ego, "egocentric", l.id);
    }
    for (int k = 0; k < w.frames; ++k) write_pose_row(out, w.start + k, l.geocentric[k], "geocentric", l.id);
  }
}

json report_to_json(const ErrorReport& r) {
  json windows = json::array();
  for (const WindowReport& w : r.windows) {
    json motions = json::array();
    for (const MotionReport& m : w.motions) {
      motions.push_back({{"body", m.body},
                         {"camera", m.camera},
                         {"label", m.label},
                         {"coverage", m.coverage},
                         {"calibrated", m.calibrated},
                         {"max_translation_m", m.max_translation},
                         {"max_rotation_deg", m.max_rotation_deg},
                         {"error_frames", m.errors.size()}});
    }
    windows.push_back({{"start", w.start},
                       {"frames", w.frames},
                       {"true_count", w.true_count},
                       {"estimated_count", w.estimated_count},
                       {"count_correct", w.count_correct},
                       {"dropout", w.dropout},
                       {"camera_drift_m", w.camera_drift},
                       {"camera_path_length_m", w.camera_path_length},
                       {"camera_drift_percent", w.camera_drift_percent},
                       {"motions", motions}});
  }
  return {{"model_count_fraction", r.model_count_fraction},
          {"coverage_fraction", r.coverage_fraction},
          {"max_camera_drift_percent", r.max_camera_drift_percent},
          {"max_rotation_deg", r.max_rotation_deg},
          {"windows", windows}};
}

void write_error_csv(std::ostream& out, const MotionReport& m) {
  out << "frame,ex,ey,ez,roll,pitch,yaw\n";
  for (const FrameError& e : m.errors) {
    out << e.frame << ',' << num(e.translation.x()) << ',' << num(e.translation.y()) << ','
        << num(e.translation.z()) << ',' << num(e.rotation_deg.x()) << ',' << num(e.rotation_deg.y()) << ','
        << num(e.rotation_deg.z()) << '\n';
  }
}

}  // namespace mvo
