#include "mvo/error.hpp"
#include "mvo/scene_simulator.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <set>

using namespace mvo;

TEST_CASE("scripted motions") {
  MotionParams still;
  still.center = Vec3(1, 2, 3);
  for (const Pose& p : scripted_motions(still, 5)) CHECK((p.translation() - still.center).norm() == 0.0);

  MotionParams spin;
  spin.kind = MotionKind::Rotate;
  spin.axis = Vec3::UnitZ();
  spin.omega = 0.1;
  const auto poses = scripted_motions(spin, 11);
  CHECK(poses[10].rotation().angle() == doctest::Approx(1.0));

  MotionParams swing;
  swing.kind = MotionKind::Swing;
  swing.axis = Vec3::UnitY();
  swing.amplitude = 0.5;
  swing.period = 8;
  swing.length = 1.0;
  const auto s = scripted_motions(swing, 9);
  // one full period later the pendulum is back where it started
  CHECK(testing::pose_distance(s[0], s[8]) < 1e-12);
}

TEST_CASE("noise-free observations are exact projections of the truth") {
  const SceneConfig cfg = testing::desk(0.0, 0.0);
  const Scene scene = generate_scene(cfg, 3);
  REQUIRE(!scene.tracklets.empty());
  // every observed point, moved by the body's hypothesis, lands on its next observation
  double worst = 0.0;
  for (const Tracklet& t : scene.tracklets) {
    const int body = scene.truth.assignment.at(t.id);
    for (int k = t.first_frame + 1; k <= t.last_frame(); ++k) {
      if (!t.observed_pair(k)) continue;
      const Pose step = scene.truth.body_hypothesis(body, k, k - 1);
      worst = std::max(worst, (step * t.at(k - 1)->point - t.at(k)->point).norm());
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("tracklet ids are unique and all assigned") {
  const Scene scene = generate_scene(testing::desk(0.5, 0.1), 1);
  std::set<TrackletId> ids;
  for (const Tracklet& t : scene.tracklets) {
    CHECK(ids.insert(t.id).second);
    CHECK(scene.truth.assignment.count(t.id) == 1);
    CHECK(t.has_consecutive_pair());
  }
  CHECK(scene.truth.assignment.size() == scene.tracklets.size());
  CHECK(scene.truth.bodies.size() == 5);
}

TEST_CASE("gaps inside a tracklet are shorter than gap_limit") {
  const SceneConfig cfg = testing::desk(0.5, 0.3);
  const Scene scene = generate_scene(cfg, 2);
  for (const Tracklet& t : scene.tracklets) {
    int run = 0;
    for (const auto& f : t.frames) {
      run = f ? 0 : run + 1;
      CHECK(run < cfg.gap_limit);
    }
  }
}

TEST_CASE("generation is deterministic in the seed") {
  const SceneConfig cfg = testing::desk(0.5, 0.1);
  const Scene a = generate_scene(cfg, 9), b = generate_scene(cfg, 9), c = generate_scene(cfg, 10);
  REQUIRE(a.tracklets.size() == b.tracklets.size());
  for (std::size_t i = 0; i < a.tracklets.size(); ++i) {
    CHECK(a.tracklets[i].id == b.tracklets[i].id);
    CHECK(a.tracklets[i].first_frame == b.tracklets[i].first_frame);
    REQUIRE(a.tracklets[i].frames.size() == b.tracklets[i].frames.size());
    const auto* fa = a.tracklets[i].at(a.tracklets[i].first_frame);
    const auto* fb = b.tracklets[i].at(b.tracklets[i].first_frame);
    CHECK(fa->obs.vector() == fb->obs.vector());
  }
  const auto* f0 = a.tracklets[0].at(a.tracklets[0].first_frame);
  const auto* g0 = c.tracklets[0].at(c.tracklets[0].first_frame);
  CHECK(f0->obs.vector() != g0->obs.vector());
}

TEST_CASE("config errors name the field") {
  nlohmann::json j = preset_config("desk");
  j["bodies"][2]["n_points"] = 0;
  try {
    scene_config_from_json(j);
    FAIL("expected ConfigInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
    CHECK(std::string(e.what()).find("bodies[2].n_points") != std::string::npos);
  }
  j = preset_config("desk");
  j["dropout"] = 1.5;
  CHECK_THROWS_AS(scene_config_from_json(j), Error);
  CHECK_THROWS_AS(preset_config("nope"), Error);
}

TEST_CASE("truth json round trip") {
  const Scene scene = generate_scene(testing::desk(0.5, 0.1), 4);
  const SceneTruth back = truth_from_json(truth_to_json(scene.truth));
  REQUIRE(back.frames() == scene.truth.frames());
  REQUIRE(back.bodies.size() == scene.truth.bodies.size());
  CHECK(back.assignment == scene.truth.assignment);
  for (int k = 0; k < back.frames(); ++k) {
    CHECK(testing::pose_distance(back.camera[k], scene.truth.camera[k]) < 1e-15);
    for (std::size_t b = 0; b < back.bodies.size(); ++b) {
      CHECK(testing::pose_distance(back.bodies[b].trajectory[k], scene.truth.bodies[b].trajectory[k]) < 1e-15);
    }
  }
}

TEST_CASE("frustum_exit preset loses part of one block") {
  const SceneConfig cfg = scene_config_from_json(preset_config("frustum_exit"));
  const Scene scene = generate_scene(cfg, 1);
  std::vector<std::set<int>> seen(scene.truth.bodies.size());
  for (const Tracklet& t : scene.tracklets) {
    for (int k = t.first_frame; k <= t.last_frame(); ++k) {
      if (t.observed(k)) seen[scene.truth.assignment.at(t.id)].insert(k);
    }
  }
  CHECK(static_cast<int>(seen[1].size()) < cfg.frames);
  for (std::size_t b = 2; b < seen.size(); ++b) CHECK(static_cast<int>(seen[b].size()) == cfg.frames);
}
