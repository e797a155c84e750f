#include "mvo/pipeline.hpp"

#include "mvo/error.hpp"
#include "mvo/labeling_engine.hpp"
#include "mvo/rng.hpp"
#include "mvo/trajectory_frames.hpp"

#include <omp.h>

#include <exception>
#include <string>

namespace mvo {

const char* to_string(Method m) { return m == Method::Mvo ? "mvo" : "sequential_ransac"; }

void WindowSchedule::validate(int frames) const {
  if (length < 2) throw Error(ErrorCode::ConfigInvalid, "--window must be >= 2");
  if (length > frames) {
    throw Error(ErrorCode::ConfigInvalid,
                "--window " + std::to_string(length) + " exceeds sequence length " + std::to_string(frames));
  }
  if (stride < 1) throw Error(ErrorCode::ConfigInvalid, "--stride must be >= 1");
}

std::vector<int> WindowSchedule::starts(int frames) const {
  std::vector<int> out;
  for (int s = 0; s + length <= frames; s += stride) out.push_back(s);
  return out;
}

PipelineOptions pipeline_options_from_json(const nlohmann::json& j) {
  PipelineOptions o;
  if (j.is_null()) return o;
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "pipeline must be an object");
  auto number = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) throw Error(ErrorCode::ConfigInvalid, std::string("pipeline.") + key + " must be a number");
    field = j.at(key).get<double>();
  };
  auto integer = [&](const char* key, int& field) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer()) {
      throw Error(ErrorCode::ConfigInvalid, std::string("pipeline.") + key + " must be an integer");
    }
    field = j.at(key).get<int>();
  };
  EnergyParams& e = o.energy;
  number("lambda", e.lambda);
  number("label_cost", e.label_cost);
  number("alpha", e.alpha);
  number("beta", e.beta);
  number("e_th", e.inlier_threshold);
  integer("k_nn", e.k_nn);
  integer("ransac_iterations", e.ransac_iterations);
  integer("min_support_points", e.min_support_points);
  integer("min_support_frames", e.min_support_frames);
  integer("max_outer_iterations", e.max_outer_iterations);
  number("sigma", o.sigma);
  if (j.contains("refine")) {
    if (!j.at("refine").is_boolean()) throw Error(ErrorCode::ConfigInvalid, "pipeline.refine must be true or false");
    o.refine = j.at("refine").get<bool>();
  }
  e.validate();
  if (!(o.sigma > 0.0)) throw Error(ErrorCode::ConfigInvalid, "pipeline.sigma must be > 0");
  return o;
}

WindowEstimate process_window(const Window& w, int start, const PipelineOptions& options, std::uint64_t seed,
                              RunTrace* trace) {
  WindowEstimate out;
  out.start = start;
  out.frames = w.frames;

  Labeling labeling;
  try {
    labeling = options.method == Method::Mvo ? run_window(w, options.energy, seed, trace)
                                             : sequential_ransac_baseline(w, options.energy, seed);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoModelsFound) throw;
    labeling.assignment.assign(w.tracklets.size(), kOutlier);
    out.failure = e.what();
  }

  std::vector<std::optional<GaussNewtonReport>> reports(labeling.labels.size());
  if (options.refine) {
    for (std::size_t l = 0; l < labeling.labels.size(); ++l) {
      Label& label = labeling.labels[l];
      const std::vector<int> support = labeling.support(label.id);
      RefinedLabel r = refine_label(w, label, support, options.sigma, options.gauss_newton);
      if (!r.solved) continue;
      label.poses = std::move(r.label.poses);
      reports[l] = r.report;
      for (int i : r.pruned) labeling.assignment[i] = kOutlier;
    }
    // a label whose whole support was pruned has nothing left to report
    std::vector<Label> kept;
    std::vector<std::optional<GaussNewtonReport>> kept_reports;
    for (std::size_t l = 0; l < labeling.labels.size(); ++l) {
      if (labeling.support(labeling.labels[l].id).empty()) continue;
      kept.push_back(std::move(labeling.labels[l]));
      kept_reports.push_back(reports[l]);
    }
    labeling.labels = std::move(kept);
    reports = std::move(kept_reports);
  }

  for (std::size_t i = 0; i < w.tracklets.size(); ++i) out.assignment.push_back({w.tracklets[i].id, labeling.assignment[i]});
  if (labeling.labels.empty()) {
    out.dropout = true;
    if (out.failure.empty()) out.failure = "no model survived";
    return out;
  }

  const MotionTrajectory camera = camera_trajectory(w, labeling);
  out.static_label = camera.label;
  for (std::size_t l = 0; l < labeling.labels.size(); ++l) {
    const Label& label = labeling.labels[l];
    const std::vector<int> support = labeling.support(label.id);
    LabelEstimate est;
    est.id = label.id;
    est.hypothesis = label.poses;
    est.center = center_of_motion(w, label, support);
    est.geocentric = geocentric(label, camera, est.center).poses;
    for (int i : support) est.support.push_back(w.tracklets[i].id);
    est.batch = reports[l];
    out.labels.push_back(std::move(est));
  }
  return out;
}

std::vector<WindowEstimate> process_sequence(const StereoIntrinsics& K, const std::vector<Tracklet>& tracklets,
                                             const WindowSchedule& schedule, const PipelineOptions& options,
                                             std::uint64_t seed, int threads) {
  const int frames = sequence_length(tracklets);
  schedule.validate(frames);
  const std::vector<int> starts = schedule.starts(frames);
  std::vector<WindowEstimate> out(starts.size());
  std::vector<std::exception_ptr> errors(starts.size());
  const int outer = std::max(1, std::min<int>(threads, static_cast<int>(starts.size())));
  // windows run side by side; the inner kernels get whatever threads remain
  const int inner = std::max(1, threads / outer);

#pragma omp parallel for schedule(dynamic) num_threads(outer)
  for (int i = 0; i < static_cast<int>(starts.size()); ++i) {
    omp_set_num_threads(inner);
    try {
      const Window w = make_window(K, tracklets, starts[i], schedule.length);
      out[i] = process_window(w, starts[i], options, hash_key({seed, static_cast<std::uint64_t>(starts[i])}));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace mvo
