#pragma once

#include "mvo/batch_estimator.hpp"
#include "mvo/labeling.hpp"
#include "mvo/tracklet.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mvo {

enum class Method { Mvo, SequentialRansac };

const char* to_string(Method m);

struct WindowSchedule {
  int length = 48;
  int stride = 1;

  /// Throws Error(ConfigInvalid) unless 2 <= length <= frames and stride >= 1.
  void validate(int frames) const;
  std::vector<int> starts(int frames) const;
};

struct PipelineOptions {
  EnergyParams energy;
  Method method = Method::Mvo;
  double sigma = 0.5;  // measurement noise for the batch solve, pixels
  bool refine = true;
  GaussNewtonOptions gauss_newton;
};

/// Reads the optional "pipeline" object of a config file: lambda, label_cost,
/// alpha, beta, e_th, k_nn, ransac_iterations, min_support_points,
/// min_support_frames, max_outer_iterations, sigma, refine. Missing keys keep
/// their defaults. Throws Error(ConfigInvalid) naming the field.
PipelineOptions pipeline_options_from_json(const nlohmann::json& j);

/// One label's final estimate in window coordinates.
struct LabelEstimate {
  LabelId id = 0;
  std::vector<std::optional<Pose>> hypothesis;  // T_{C_k C_s}
  std::vector<std::optional<Pose>> geocentric;  // T_{l_k l_1}
  Vec3 center = Vec3::Zero();
  std::vector<TrackletId> support;
  std::optional<GaussNewtonReport> batch;
};

struct WindowEstimate {
  int start = 0;
  int frames = 0;
  bool dropout = false;  // no model survived
  std::string failure;
  LabelId static_label = kOutlier;
  std::vector<LabelEstimate> labels;  // ascending id
  std::vector<std::pair<TrackletId, LabelId>> assignment;  // ascending tracklet id
};

struct RunTrace;

/// Fits one window and converts the refined labels. `trace` records the fitting loop's
/// energies (Mvo only).
WindowEstimate process_window(const Window& w, int start, const PipelineOptions& options, std::uint64_t seed,
                              RunTrace* trace = nullptr);

/// Every scheduled window, processed in parallel on up to `threads` threads
/// and returned in window order. Each window's seed derives from (seed, start).
std::vector<WindowEstimate> process_sequence(const StereoIntrinsics& K, const std::vector<Tracklet>& tracklets,
                                             const WindowSchedule& schedule, const PipelineOptions& options,
                                             std::uint64_t seed, int threads);

}  // namespace mvo
