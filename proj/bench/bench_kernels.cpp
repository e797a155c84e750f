// Serial against OpenMP versions of the three hot kernels, on the desk scene.
// Parallel cases take the thread count as their argument.

#include "mvo/kernels.hpp"
#include "mvo/labeling.hpp"
#include "mvo/scene_simulator.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

namespace {

using namespace mvo;

struct Fixture {
  Window window;
  std::vector<kernels::StepChain> chains;
  kernels::FramePairData pair;
  std::vector<Pose> hypotheses;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture f;
    const SceneConfig cfg = scene_config_from_json(preset_config("desk"));
    const Scene scene = generate_scene(cfg, 1);
    f.window = make_window(cfg.intrinsics, scene.tracklets, 0, 48);
    for (const RigidBody& b : scene.truth.bodies) {
      Label l;
      for (int k = 0; k < f.window.frames; ++k) l.poses.push_back(scene.truth.body_hypothesis(b.id, k, 0));
      f.chains.push_back(l.steps());
    }
    for (const Tracklet& t : f.window.tracklets) {
      const TrackletFrame* a = t.at(9);
      const TrackletFrame* b = t.at(10);
      if (!a || !b) continue;
      f.pair.previous_points.push_back(a->point);
      f.pair.current_points.push_back(b->point);
      f.pair.current_obs.push_back(b->obs);
    }
    std::mt19937_64 gen(7);
    std::normal_distribution<double> n(0.0, 0.01);
    for (int h = 0; h < 256; ++h) f.hypotheses.push_back(exp(Twist(Vec6(Vec6::NullaryExpr([&] { return n(gen); })))));
    return f;
  }();
  return f;
}

void BM_NearestNeighborsSerial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::nearest_neighbors_serial(f.window.tracklets, 5));
}

void BM_NearestNeighborsParallel(benchmark::State& state) {
  const Fixture& f = fixture();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::nearest_neighbors_parallel(f.window.tracklets, 5));
}

void BM_ResidualMatrixSerial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::residual_matrix_serial(f.window.intrinsics, f.window.tracklets, f.chains));
  }
}

void BM_ResidualMatrixParallel(benchmark::State& state) {
  const Fixture& f = fixture();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::residual_matrix_parallel(f.window.intrinsics, f.window.tracklets, f.chains));
  }
}

void BM_ScoreHypothesesSerial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::score_hypotheses_serial(f.window.intrinsics, f.pair, f.hypotheses, 4.0));
  }
}

void BM_ScoreHypothesesParallel(benchmark::State& state) {
  const Fixture& f = fixture();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::score_hypotheses_parallel(f.window.intrinsics, f.pair, f.hypotheses, 4.0));
  }
}

}  // namespace

BENCHMARK(BM_NearestNeighborsSerial)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NearestNeighborsParallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualMatrixSerial)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualMatrixParallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreHypothesesSerial)->UseRealTime()->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScoreHypothesesParallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
