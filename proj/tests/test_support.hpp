#pragma once

#include "mvo/labeling.hpp"
#include "mvo/tracklet_graph.hpp"
#include "mvo/scene_simulator.hpp"
#include "mvo/se3.hpp"

#include <algorithm>
#include <random>

namespace testing {

inline mvo::Vec3 random_vec(std::mt19937_64& gen, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(gen), u(gen), u(gen)};
}

inline mvo::Twist random_twist(std::mt19937_64& gen, double max_rho, double max_phi) {
  mvo::Vec3 axis = random_vec(gen, 1.0).normalized();
  std::uniform_real_distribution<double> a(0.0, max_phi);
  return {random_vec(gen, max_rho), axis * a(gen)};
}

inline mvo::Pose random_pose(std::mt19937_64& gen, double max_t = 1.0, double max_angle = 3.0) {
  return mvo::exp(random_twist(gen, max_t, max_angle));
}

inline double pose_distance(const mvo::Pose& a, const mvo::Pose& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

/// Random short tracklets with gaps; positions cluster so distances tie now
/// and then.
inline std::vector<mvo::Tracklet> random_tracklets(std::mt19937_64& gen, int n, int frames) {
  const mvo::StereoIntrinsics K;
  std::uniform_int_distribution<int> start(0, frames - 2), pixel(0, 40);
  std::bernoulli_distribution gap(0.15);
  std::vector<mvo::Tracklet> out;
  for (int i = 0; out.size() < static_cast<std::size_t>(n); ++i) {
    const int first = start(gen);
    std::uniform_int_distribution<int> len(2, frames - first);
    std::vector<std::optional<mvo::StereoObservation>> obs;
    const int l = len(gen);
    for (int k = 0; k < l; ++k) {
      if (k > 0 && k + 1 < l && gap(gen)) {
        obs.emplace_back();
      } else {
        obs.push_back(mvo::StereoObservation{300.0 + pixel(gen), 200.0 + pixel(gen), 5.0 + pixel(gen)});
      }
    }
    auto t = mvo::make_tracklet(K, 1000 - i, first, obs);
    if (t && t->has_consecutive_pair()) out.push_back(std::move(*t));
  }
  return out;
}

/// Desk preset with the noise knobs overridden.
inline mvo::SceneConfig desk(double sigma, double dropout) {
  nlohmann::json j = mvo::preset_config("desk");
  j["noise_sigma"] = sigma;
  j["dropout"] = dropout;
  return mvo::scene_config_from_json(j);
}

/// A static camera facing one block; `moving` makes the block spin.
inline mvo::SceneConfig single_block(bool moving, double sigma, int frames = 12) {
  nlohmann::json j = {
      {"frames", frames},
      {"camera_motion", {{"kind", "static"}, {"center", {0.0, 0.0, 0.0}}}},
      {"bodies",
       {{{"kind", moving ? "rotate" : "static"},
         {"center", {0.0, 0.0, 3.0}},
         {"axis", {0.0, 1.0, 0.0}},
         {"omega", moving ? 0.05 : 0.0},
         {"extent", {1.5, 1.5, 1.5}},
         {"n_points", 200}}}},
      {"noise_sigma", sigma},
      {"dropout", 0.0}};
  return mvo::scene_config_from_json(j);
}

/// Camera-egomotion hypotheses of every true body over a window.
inline std::vector<mvo::Label> truth_labels(const mvo::SceneTruth& truth, int start, int frames) {
  std::vector<mvo::Label> out;
  for (const mvo::RigidBody& b : truth.bodies) {
    mvo::Label l;
    l.id = b.id;
    for (int k = 0; k < frames; ++k) l.poses.push_back(truth.body_hypothesis(b.id, start + k, start));
    out.push_back(std::move(l));
  }
  return out;
}

/// A tiny labeling problem cut from a noisy desk scene: up to `max_tracklets`
/// tracklets over a short window, the existing labeling holding up to two
/// perturbed true motions and the proposals holding the rest.
struct SmallInstance {
  mvo::Window window;
  mvo::Labeling labeling;
  std::vector<mvo::Label> proposals;
  mvo::NeighborhoodGraph graph;
  mvo::EnergyParams params;
};

inline SmallInstance small_instance(std::mt19937_64& gen, const mvo::StereoIntrinsics& K, const mvo::Scene& scene,
                                    int max_tracklets, int max_labels) {
  using namespace mvo;
  const int frames = 6;
  std::uniform_int_distribution<int> start_pick(0, scene.truth.frames() - frames);
  const int start = start_pick(gen);
  SmallInstance s;
  Window full = make_window(K, scene.tracklets, start, frames);
  std::shuffle(full.tracklets.begin(), full.tracklets.end(), gen);
  std::uniform_int_distribution<int> count(2, max_tracklets);
  full.tracklets.resize(std::min<std::size_t>(full.tracklets.size(), count(gen)));
  std::sort(full.tracklets.begin(), full.tracklets.end(),
            [](const Tracklet& a, const Tracklet& b) { return a.id < b.id; });
  s.window = std::move(full);

  std::vector<Label> truth = truth_labels(scene.truth, start, frames);
  std::shuffle(truth.begin(), truth.end(), gen);
  std::uniform_int_distribution<int> nl(1, max_labels);
  truth.resize(nl(gen));
  for (Label& l : truth) {
    for (auto& p : l.poses) p = random_pose(gen, 0.003, 0.003) * *p;
  }
  std::uniform_int_distribution<int> existing(0, std::min<int>(2, static_cast<int>(truth.size())));
  const int keep = existing(gen);
  for (int i = 0; i < static_cast<int>(truth.size()); ++i) {
    if (i < keep) {
      s.labeling.add(truth[i]);
    } else {
      s.proposals.push_back(truth[i]);
    }
  }
  std::uniform_int_distribution<int> pick(-1, static_cast<int>(s.labeling.labels.size()) - 1);
  for (std::size_t i = 0; i < s.window.tracklets.size(); ++i) {
    const int c = pick(gen);
    s.labeling.assignment.push_back(c < 0 ? kOutlier : s.labeling.labels[c].id);
  }
  s.graph = build_graph(s.window.tracklets, 2);
  std::uniform_real_distribution<double> cost(1.0, 20.0);
  s.params.label_cost = cost(gen);
  s.params.lambda = cost(gen) / 4;
  return s;
}

/// Minimum of the energy over every assignment to the candidate labels plus O.
inline double exhaustive_minimum(const mvo::ResidualTable& table, const std::vector<mvo::Label>& candidates,
                                 const mvo::NeighborhoodGraph& graph, const mvo::EnergyParams& params) {
  using namespace mvo;
  const int n = table.rows;
  const int m = static_cast<int>(candidates.size()) + 1;
  std::vector<int> digits(n, 0);
  std::vector<LabelId> x(n);
  double best = kernels::kInfinity;
  for (;;) {
    for (int i = 0; i < n; ++i) x[i] = digits[i] == m - 1 ? kOutlier : candidates[digits[i]].id;
    best = std::min(best, energy_from_table(table, candidates, x, graph, params).total());
    int i = 0;
    while (i < n && ++digits[i] == m) digits[i++] = 0;
    if (i == n) break;
  }
  return best;
}

}  // namespace testing
