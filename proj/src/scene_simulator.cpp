#include "mvo/scene_simulator.hpp"

#include "mvo/error.hpp"
#include "mvo/rng.hpp"

#include <cmath>
#include <random>
#include <string>

namespace mvo {

namespace {

using nlohmann::json;

Rotation look_at_rotation(const Vec3& position, const Vec3& target) {
  const Vec3 forward = (target - position).normalized();
  Vec3 right = forward.cross(Vec3::UnitZ());
  if (right.norm() < 1e-9) right = Vec3::UnitX();
  right.normalize();
  const Vec3 down = forward.cross(right);
  Mat3 r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return Rotation::from_matrix(r);
}

void plane_basis(const Vec3& axis, Vec3& e1, Vec3& e2) {
  const Vec3 a = axis.normalized();
  const Vec3 seed = std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  e1 = (seed - a * a.dot(seed)).normalized();
  e2 = a.cross(e1);
}

Pose motion_pose(const MotionParams& m, int k) {
  const Rotation r0 = Rotation::from_rpy(m.rpy.x(), m.rpy.y(), m.rpy.z());
  switch (m.kind) {
    case MotionKind::Static:
      return Pose(r0, m.center);
    case MotionKind::Rotate:
      return Pose(Rotation::about_axis(m.axis, m.omega * k) * r0, m.center);
    case MotionKind::Swing: {
      const double theta = m.amplitude * std::sin(2.0 * kPi * k / m.period + m.phase);
      const Rotation swing = Rotation::about_axis(m.axis, theta);
      const Vec3 position = m.center + swing * Vec3(0.0, 0.0, -m.length);
      return Pose(swing * Rotation::about_z(m.spin * k) * r0, position);
    }
    case MotionKind::Orbit: {
      Vec3 e1, e2;
      plane_basis(m.axis, e1, e2);
      const double theta = m.phase + m.omega * k;
      const double bob = m.bob_amplitude * std::sin(2.0 * kPi * k / m.bob_period);
      const Vec3 position =
          m.center + m.radius * (std::cos(theta) * e1 + std::sin(theta) * e2) + bob * m.axis.normalized();
      if (m.look_at) return Pose(look_at_rotation(position, *m.look_at), position);
      return Pose(Rotation::about_axis(m.axis, m.omega * k) * r0, position);
    }
  }
  return Pose();
}

std::vector<Vec3> sample_box_surface(const Vec3& extent, int n, std::mt19937_64& gen) {
  const double ax = extent.y() * extent.z(), ay = extent.x() * extent.z(), az = extent.x() * extent.y();
  std::discrete_distribution<int> face({ax, ax, ay, ay, az, az});
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int f = face(gen);
    Vec3 p(unit(gen) * extent.x(), unit(gen) * extent.y(), unit(gen) * extent.z());
    const int axis = f / 2;
    p(axis) = (f % 2 == 0 ? -0.5 : 0.5) * extent(axis);
    pts.push_back(p);
  }
  return pts;
}

bool inside_image(const StereoIntrinsics& K, const StereoObservation& o) {
  const double ur = o.u - o.d;
  return o.u >= 0.0 && o.u < K.width && ur >= 0.0 && ur < K.width && o.v >= 0.0 && o.v < K.height;
}

// ---- JSON helpers ---------------------------------------------------------

[[noreturn]] void invalid(const std::string& field, const std::string& rule) {
  throw Error(ErrorCode::ConfigInvalid, field + " " + rule);
}

double get_number(const json& j, const char* key, const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) invalid(path + "." + key, "must be a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const char* key, const std::string& path, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) invalid(path + "." + key, "must be an integer");
  return j.at(key).get<int>();
}

Vec3 get_vec3(const json& j, const char* key, const std::string& path, const Vec3& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
    invalid(path + "." + key, "must be an array of 3 numbers");
  }
  return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

MotionParams motion_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) invalid(path, "must be an object");
  MotionParams m;
  const std::string kind = j.value("kind", std::string("static"));
  if (kind == "static") {
    m.kind = MotionKind::Static;
  } else if (kind == "swing") {
    m.kind = MotionKind::Swing;
  } else if (kind == "rotate") {
    m.kind = MotionKind::Rotate;
  } else if (kind == "orbit") {
    m.kind = MotionKind::Orbit;
  } else {
    invalid(path + ".kind", "must be one of static, swing, rotate, orbit (got '" + kind + "')");
  }
  m.center = get_vec3(j, "center", path, m.center);
  m.rpy = get_vec3(j, "rpy", path, m.rpy);
  m.axis = get_vec3(j, "axis", path, m.axis);
  if (m.axis.norm() < 1e-12) invalid(path + ".axis", "must be non-zero");
  m.omega = get_number(j, "omega", path, m.omega);
  m.amplitude = get_number(j, "amplitude", path, m.amplitude);
  m.period = get_number(j, "period", path, m.period);
  if (m.period <= 0.0) invalid(path + ".period", "must be > 0");
  m.phase = get_number(j, "phase", path, m.phase);
  m.length = get_number(j, "length", path, m.length);
  m.spin = get_number(j, "spin", path, m.spin);
  m.radius = get_number(j, "radius", path, m.radius);
  m.bob_amplitude = get_number(j, "bob_amplitude", path, m.bob_amplitude);
  m.bob_period = get_number(j, "bob_period", path, m.bob_period);
  if (m.bob_period <= 0.0) invalid(path + ".bob_period", "must be > 0");
  if (j.contains("look_at")) m.look_at = get_vec3(j, "look_at", path, Vec3::Zero());
  return m;
}

json pose_json(const Pose& p) { return p.to_row_major(); }

Pose pose_from(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 12) invalid(path, "must be an array of 12 numbers");
  std::array<double, 12> v{};
  for (int i = 0; i < 12; ++i) v[i] = j[i].get<double>();
  return Pose::from_row_major(v);
}

}  // namespace

std::vector<Pose> scripted_motions(const MotionParams& params, int frames) {
  std::vector<Pose> out;
  out.reserve(frames);
  for (int k = 0; k < frames; ++k) out.push_back(motion_pose(params, k));
  return out;
}

void SceneConfig::validate() const {
  if (frames < 2) invalid("frames", "must be >= 2");
  intrinsics.validate();
  if (bodies.empty()) invalid("bodies", "must contain at least the background body");
  if (noise_sigma < 0.0) invalid("noise_sigma", "must be >= 0");
  if (dropout < 0.0 || dropout >= 1.0) invalid("dropout", "must be in [0, 1)");
  if (gap_limit < 1) invalid("gap_limit", "must be >= 1");
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const std::string path = "bodies[" + std::to_string(i) + "]";
    if (bodies[i].n_points <= 0) invalid(path + ".n_points", "must be > 0");
    if ((bodies[i].extent.array() <= 0.0).any()) invalid(path + ".extent", "must be positive");
  }
}

Pose SceneTruth::body_hypothesis(int id, int frame, int ref) const {
  const auto& traj = bodies.at(id).trajectory;
  return camera[frame] * traj[frame] * traj[ref].inverse() * camera[ref].inverse();
}

Scene generate_scene(const SceneConfig& config, std::uint64_t seed) {
  config.validate();
  const StereoIntrinsics& K = config.intrinsics;
  const int n_frames = config.frames;

  Scene scene;
  std::vector<Pose> camera_to_world = scripted_motions(config.camera_motion, n_frames);
  for (const Pose& p : camera_to_world) scene.truth.camera.push_back(p.inverse());

  TrackletId next_id = 0;
  for (std::size_t b = 0; b < config.bodies.size(); ++b) {
    const BodyConfig& bc = config.bodies[b];
    RigidBody body;
    body.id = static_cast<int>(b);
    std::mt19937_64 shape_gen(hash_key({seed, 0x5eedULL, b}));
    body.points = sample_box_surface(bc.extent, bc.n_points, shape_gen);
    body.trajectory = scripted_motions(bc.motion, n_frames);

    for (std::size_t i = 0; i < body.points.size(); ++i) {
      std::mt19937_64 gen(hash_key({seed, 0x0b5ULL, b, i}));
      std::normal_distribution<double> noise(0.0, 1.0);
      std::bernoulli_distribution drop(config.dropout);

      std::vector<std::optional<StereoObservation>> run;
      int run_start = 0;
      int gap = 0;
      auto flush = [&] {
        if (run.empty()) return;
        auto t = make_tracklet(K, next_id, run_start, run);
        if (t && t->has_consecutive_pair()) {
          scene.truth.assignment[next_id] = body.id;
          scene.tracklets.push_back(std::move(*t));
          ++next_id;
        }
        run.clear();
      };

      for (int k = 0; k < n_frames; ++k) {
        const Vec3 pc = scene.truth.camera[k] * (body.trajectory[k] * body.points[i]);
        // Draw the same number of variates every frame so the stream stays
        // aligned regardless of visibility.
        const double nu = noise(gen), nv = noise(gen), nd = noise(gen);
        const bool dropped = drop(gen);
        std::optional<StereoObservation> obs;
        if (in_frustum(K, pc) && !dropped) {
          StereoObservation o = project(K, pc);
          o.u += config.noise_sigma * nu;
          o.v += config.noise_sigma * nv;
          o.d += config.noise_sigma * nd;
          if (o.d > K.min_disparity && inside_image(K, o)) obs = o;
        }
        if (!obs) {
          ++gap;
          continue;
        }
        if (!run.empty() && gap >= config.gap_limit) flush();
        if (run.empty()) {
          run_start = k;
        } else {
          for (int g = 0; g < gap; ++g) run.emplace_back();
        }
        run.push_back(obs);
        gap = 0;
      }
      flush();
    }
    scene.truth.bodies.push_back(std::move(body));
  }
  return scene;
}

StereoIntrinsics intrinsics_from_json(const json& j) {
  const std::string path = "intrinsics";
  if (!j.is_object()) invalid(path, "must be an object");
  StereoIntrinsics K;
  K.fu = get_number(j, "fu", path, K.fu);
  K.fv = get_number(j, "fv", path, K.fv);
  K.cu = get_number(j, "cu", path, K.cu);
  K.cv = get_number(j, "cv", path, K.cv);
  K.baseline = get_number(j, "b", path, K.baseline);
  K.width = get_int(j, "width", path, K.width);
  K.height = get_int(j, "height", path, K.height);
  K.z_near = get_number(j, "z_near", path, K.z_near);
  K.min_disparity = get_number(j, "min_disparity", path, K.min_disparity);
  K.validate();
  return K;
}

SceneConfig scene_config_from_json(const json& j) {
  if (!j.is_object()) invalid("config", "must be a JSON object");
  SceneConfig c;
  c.frames = get_int(j, "frames", "config", c.frames);
  if (j.contains("intrinsics")) c.intrinsics = intrinsics_from_json(j.at("intrinsics"));
  if (j.contains("camera_motion")) c.camera_motion = motion_from_json(j.at("camera_motion"), "camera_motion");
  if (!j.contains("bodies") || !j.at("bodies").is_array()) invalid("bodies", "must be an array");
  for (std::size_t i = 0; i < j.at("bodies").size(); ++i) {
    const std::string path = "bodies[" + std::to_string(i) + "]";
    const json& jb = j.at("bodies")[i];
    BodyConfig b;
    b.motion = motion_from_json(jb, path);
    b.n_points = get_int(jb, "n_points", path, b.n_points);
    b.extent = get_vec3(jb, "extent", path, b.extent);
    c.bodies.push_back(b);
  }
  c.noise_sigma = get_number(j, "noise_sigma", "config", c.noise_sigma);
  c.dropout = get_number(j, "dropout", "config", c.dropout);
  c.gap_limit = get_int(j, "gap_limit", "config", c.gap_limit);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer() || j.at("seed").get<std::int64_t>() < 0) invalid("seed", "must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  c.validate();
  return c;
}

json truth_to_json(const SceneTruth& truth) {
  json cam = json::array();
  for (const Pose& p : truth.camera) cam.push_back(pose_json(p));
  json bodies = json::array();
  for (const RigidBody& b : truth.bodies) {
    json traj = json::array();
    for (const Pose& p : b.trajectory) traj.push_back(pose_json(p));
    json pts = json::array();
    for (const Vec3& p : b.points) pts.push_back({p.x(), p.y(), p.z()});
    bodies.push_back({{"id", b.id}, {"trajectory", std::move(traj)}, {"points", std::move(pts)}});
  }
  json assignment = json::array();
  for (const auto& [id, body] : truth.assignment) assignment.push_back({id, body});
  return {{"frames", truth.frames()},
          {"camera", std::move(cam)},
          {"bodies", std::move(bodies)},
          {"assignment", std::move(assignment)}};
}

SceneTruth truth_from_json(const json& j) {
  SceneTruth t;
  try {
    for (const json& p : j.at("camera")) t.camera.push_back(pose_from(p, "camera"));
    for (const json& jb : j.at("bodies")) {
      RigidBody b;
      b.id = jb.at("id").get<int>();
      for (const json& p : jb.at("trajectory")) b.trajectory.push_back(pose_from(p, "bodies.trajectory"));
      if (jb.contains("points")) {
        for (const json& p : jb.at("points")) b.points.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
      }
      t.bodies.push_back(std::move(b));
    }
    for (const json& a : j.at("assignment")) t.assignment[a[0].get<TrackletId>()] = a[1].get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("truth file: ") + e.what());
  }
  return t;
}

}  // namespace mvo
