// mvo_cli: simulate scenes, run the multimotion pipeline over sliding
// windows, and score the results against simulator truth.

#include "mvo/dump_io.hpp"
#include "mvo/error.hpp"
#include "mvo/evaluation.hpp"
#include "mvo/pipeline.hpp"
#include "mvo/scene_simulator.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Args {
  std::string config;
  std::optional<std::uint64_t> seed;
  int window = 48;
  int stride = 1;
  std::string output = "out";
  int threads = 1;
  std::string tracklets;
  std::string truth;
  std::string input;
};

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw mvo::Error(mvo::ErrorCode::ParseError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw mvo::Error(mvo::ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

// --config is a preset name or a JSON file.
json resolve_config(const Args& a) {
  if (a.config.empty()) throw UsageError("--config is required");
  if (fs::exists(a.config)) {
    std::ifstream in(a.config);
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("--config " + a.config + ": " + e.what());
    }
  }
  try {
    return mvo::preset_config(a.config);
  } catch (const mvo::Error&) {
    throw UsageError("--config '" + a.config + "' is neither a file nor a preset (desk, frustum_exit)");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mvo::Error(mvo::ErrorCode::ParseError, "cannot write " + path.string());
  out << text;
}

std::string window_name(const char* prefix, int start, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04d.%s", prefix, start, ext);
  return buf;
}

struct Loaded {
  mvo::SceneConfig scene;
  mvo::PipelineOptions pipeline;
};

Loaded load_config(const Args& a) {
  const json j = resolve_config(a);
  Loaded l;
  l.scene = mvo::scene_config_from_json(j);
  if (a.seed) l.scene.seed = *a.seed;
  l.pipeline = mvo::pipeline_options_from_json(j.value("pipeline", json()));
  return l;
}

void simulate(const Args& a, const Loaded& cfg) {
  const mvo::Scene scene = mvo::generate_scene(cfg.scene, cfg.scene.seed);
  std::ostringstream t;
  mvo::write_tracklets_jsonl(t, scene.tracklets);
  write_text(fs::path(a.output) / "tracklets.jsonl", t.str());
  write_text(fs::path(a.output) / "truth.json", mvo::truth_to_json(scene.truth).dump() + "\n");
  std::cerr << "simulate: " << scene.tracklets.size() << " tracklets over " << scene.truth.frames() << " frames\n";
}

void run(const Args& a, const Loaded& cfg, mvo::Method method) {
  const fs::path tracklet_path = a.tracklets.empty() ? fs::path(a.output) / "tracklets.jsonl" : fs::path(a.tracklets);
  std::ifstream in(tracklet_path);
  if (!in) throw UsageError("--tracklets: cannot open " + tracklet_path.string());
  const auto tracklets = mvo::read_tracklets_jsonl(in, cfg.scene.intrinsics);

  mvo::PipelineOptions options = cfg.pipeline;
  options.method = method;
  const mvo::WindowSchedule schedule{a.window, a.stride};
  try {
    schedule.validate(mvo::sequence_length(tracklets));
  } catch (const mvo::Error& e) {
    throw UsageError(e.what());
  }
  const auto windows =
      mvo::process_sequence(cfg.scene.intrinsics, tracklets, schedule, options, cfg.scene.seed, a.threads);

  const fs::path dir = fs::path(a.output) / (method == mvo::Method::Mvo ? "mvo" : "baseline");
  fs::remove_all(dir);
  int dropouts = 0;
  for (const mvo::WindowEstimate& w : windows) {
    write_text(dir / window_name("window", w.start, "json"), mvo::window_to_json(w).dump(1) + "\n");
    std::ostringstream csv;
    mvo::write_trajectory_csv(csv, w);
    write_text(dir / window_name("trajectory", w.start, "csv"), csv.str());
    dropouts += w.dropout;
  }
  std::cerr << mvo::to_string(method) << ": " << windows.size() << " windows, " << dropouts << " dropouts\n";
}

mvo::ErrorReport evaluate(const fs::path& input, const fs::path& truth_path) {
  if (!fs::is_directory(input)) throw UsageError("--input: " + input.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(input)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("window_", 0) == 0 && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("--input: no window_*.json dumps in " + input.string());
  if (!fs::exists(truth_path)) throw UsageError("--truth: cannot open " + truth_path.string());

  std::vector<mvo::WindowEstimate> windows;
  mvo::SceneTruth truth;
  // Dumps share the config field readers, but a malformed dump is bad input data rather than bad usage.
  try {
    for (const fs::path& f : files) windows.push_back(mvo::window_from_json(load_json(f)));
    truth = mvo::truth_from_json(load_json(truth_path));
  } catch (const mvo::Error& e) {
    if (e.code() != mvo::ErrorCode::ConfigInvalid) throw;
    throw mvo::Error(mvo::ErrorCode::ParseError, e.what());
  }
  for (const auto& w : windows) {
    if (w.start + w.frames > truth.frames()) throw mvo::Error(mvo::ErrorCode::ParseError, "truth is shorter than the dumps");
  }
  const mvo::ErrorReport report = mvo::evaluate(windows, truth);

  write_text(input / "report.json", mvo::report_to_json(report).dump(1) + "\n");
  fs::remove_all(input / "errors");
  for (const mvo::WindowReport& w : report.windows) {
    for (const mvo::MotionReport& m : w.motions) {
      if (!m.calibrated) continue;
      std::ostringstream csv;
      mvo::write_error_csv(csv, m);
      const std::string stem = m.camera ? "camera" : "body_" + std::to_string(m.body);
      write_text(input / "errors" / window_name(stem.c_str(), w.start, "csv"), csv.str());
    }
  }
  return report;
}

void add_common(CLI::App* cmd, Args& a, bool needs_config) {
  auto* c = cmd->add_option("--config", a.config, "preset name (desk, frustum_exit) or scene config JSON");
  if (needs_config) c->required();
  cmd->add_option("--seed", a.seed, "override the config seed");
  cmd->add_option("--window", a.window, "window length K in frames")->capture_default_str();
  cmd->add_option("--stride", a.stride, "window stride in frames")->capture_default_str();
  cmd->add_option("--output", a.output, "output directory")->capture_default_str();
  cmd->add_option("--threads", a.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimotion visual odometry on simulated stereo tracklets"};
  app.require_subcommand(1);
  Args a;

  auto* sim = app.add_subcommand("simulate", "generate tracklets.jsonl and truth.json");
  add_common(sim, a, true);
  auto* run_cmd = app.add_subcommand("run", "multimotion estimation per window");
  add_common(run_cmd, a, true);
  run_cmd->add_option("--tracklets", a.tracklets, "tracklet JSONL (default OUTPUT/tracklets.jsonl)");
  auto* base = app.add_subcommand("baseline", "sequential RANSAC per window");
  add_common(base, a, true);
  base->add_option("--tracklets", a.tracklets, "tracklet JSONL (default OUTPUT/tracklets.jsonl)");
  auto* eval = app.add_subcommand("evaluate", "score window dumps against truth");
  add_common(eval, a, false);
  eval->add_option("--input", a.input, "directory of window dumps (default OUTPUT/mvo)");
  eval->add_option("--truth", a.truth, "truth JSON (default OUTPUT/truth.json)");
  auto* all = app.add_subcommand("all", "simulate, run, baseline, evaluate");
  add_common(all, a, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    omp_set_num_threads(a.threads);
    const fs::path out(a.output);
    if (*sim) {
      simulate(a, load_config(a));
    } else if (*run_cmd) {
      run(a, load_config(a), mvo::Method::Mvo);
    } else if (*base) {
      run(a, load_config(a), mvo::Method::SequentialRansac);
    } else if (*eval) {
      const fs::path input = a.input.empty() ? out / "mvo" : fs::path(a.input);
      const fs::path truth = a.truth.empty() ? out / "truth.json" : fs::path(a.truth);
      const auto r = evaluate(input, truth);
      std::cerr << "model count correct: " << r.model_count_fraction << "\n";
    } else if (*all) {
      const Loaded cfg = load_config(a);
      simulate(a, cfg);
      run(a, cfg, mvo::Method::Mvo);
      run(a, cfg, mvo::Method::SequentialRansac);
      const auto mvo_report = evaluate(out / "mvo", out / "truth.json");
      const auto baseline_report = evaluate(out / "baseline", out / "truth.json");
      json summary = mvo::report_to_json(mvo_report);
      summary["baseline_model_count_fraction"] = baseline_report.model_count_fraction;
      write_text(out / "report.json", summary.dump(1) + "\n");
      std::cerr << "model count correct: mvo " << mvo_report.model_count_fraction << ", baseline "
                << baseline_report.model_count_fraction << "\n";
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mvo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == mvo::ErrorCode::ConfigInvalid ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
