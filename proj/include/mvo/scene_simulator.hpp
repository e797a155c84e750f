#pragma once

#include "mvo/se3.hpp"
#include "mvo/stereo_camera.hpp"
#include "mvo/tracklet.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mvo {

enum class MotionKind { Static, Swing, Rotate, Orbit };

/// Parameters of a scripted motion. Angles in radians, rates per frame,
/// lengths in meters. Which fields apply depends on `kind`:
///   static: center, rpy
///   rotate: center, rpy, axis, omega
///   swing:  center (pivot), rpy, axis (swing axis), amplitude, period, phase,
///           length (arm), spin (extra rotation about the hanging axis)
///   orbit:  center, axis (circle normal), radius, omega, phase (start angle),
///           bob_amplitude, bob_period, look_at (cameras), rpy
struct MotionParams {
  MotionKind kind = MotionKind::Static;
  Vec3 center = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  double omega = 0.0;
  double amplitude = 0.0;
  double period = 1.0;
  double phase = 0.0;
  double length = 0.0;
  double spin = 0.0;
  double radius = 0.0;
  double bob_amplitude = 0.0;
  double bob_period = 1.0;
  std::optional<Vec3> look_at;
};

/// Body-to-world poses for frames 0..frames-1. With look_at set (orbit only)
/// the poses are camera-to-world for an x-right, y-down, z-forward camera in a
/// z-up world.
std::vector<Pose> scripted_motions(const MotionParams& params, int frames);

struct BodyConfig {
  MotionParams motion;
  int n_points = 100;
  Vec3 extent = Vec3::Constant(0.3);  // box edge lengths
};

struct SceneConfig {
  int frames = 48;
  StereoIntrinsics intrinsics;
  MotionParams camera_motion;
  std::vector<BodyConfig> bodies;  // bodies[0] is the static background
  double noise_sigma = 0.5;        // pixels, applied to u, v and d
  double dropout = 0.0;            // per-frame probability of losing an observation
  int gap_limit = 2;               // unobserved run that terminates a tracklet
  std::uint64_t seed = 0;

  /// Throws Error(ConfigInvalid) with the offending field path.
  void validate() const;
};

struct RigidBody {
  int id = 0;
  std::vector<Vec3> points;       // body frame
  std::vector<Pose> trajectory;   // body-to-world per frame
};

struct SceneTruth {
  std::vector<Pose> camera;       // world-to-camera per frame
  std::vector<RigidBody> bodies;  // id 0 is the static background
  std::map<TrackletId, int> assignment;

  int frames() const { return static_cast<int>(camera.size()); }

  /// Camera-egomotion hypothesis that makes body `id` look static:
  /// T_{C_k C_ref} = T_CW(k) T_WB(k) T_WB(ref)^-1 T_CW(ref)^-1.
  Pose body_hypothesis(int id, int frame, int ref) const;
};

struct Scene {
  std::vector<Tracklet> tracklets;
  SceneTruth truth;
};

/// Deterministic in (config, seed); `seed` overrides config.seed.
Scene generate_scene(const SceneConfig& config, std::uint64_t seed);

// JSON mapping. Parsing reports field-level problems as Error(ConfigInvalid).
SceneConfig scene_config_from_json(const nlohmann::json& j);
StereoIntrinsics intrinsics_from_json(const nlohmann::json& j);
nlohmann::json truth_to_json(const SceneTruth& truth);
SceneTruth truth_from_json(const nlohmann::json& j);

/// Built-in scenes: "desk" (four moving blocks over a static background, seen by an orbiting
/// camera) and "frustum_exit" (the same, but one block leaves the view mid-sequence).
nlohmann::json preset_config(const std::string& name);

}  // namespace mvo
