#include "mvo/assignment.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace mvo;

namespace {

AssignmentProblem random_problem(std::mt19937_64& gen, int n, int cols) {
  AssignmentProblem pr;
  pr.tracklets = n;
  pr.columns = cols;
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::bernoulli_distribution inf(0.1), edge(0.35);
  for (int i = 0; i < n * cols; ++i) pr.unary.push_back(inf(gen) ? kernels::kInfinity : u(gen));
  for (int p = 0; p < n; ++p) pr.unary[static_cast<std::size_t>(p) * cols + cols - 1] = u(gen);  // O always finite
  for (int c = 0; c < cols; ++c) pr.label_cost.push_back(c + 1 == cols ? 0.0 : u(gen));
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      if (edge(gen)) pr.edges.push_back({p, q, 1.0, 0.0});
    }
  }
  pr.lambda = u(gen) / 3;
  return pr;
}

double brute_force(const AssignmentProblem& pr) {
  std::vector<int> x(pr.tracklets, 0);
  double best = kernels::kInfinity;
  for (;;) {
    best = std::min(best, pr.energy(x));
    int i = 0;
    while (i < pr.tracklets && ++x[i] == pr.columns) x[i++] = 0;
    if (i == pr.tracklets) break;
  }
  return best;
}

bool single_move_minimum(const AssignmentProblem& pr, std::vector<int> x) {
  const double e = pr.energy(x);
  for (int p = 0; p < pr.tracklets; ++p) {
    const int keep = x[p];
    for (int c = 0; c < pr.columns; ++c) {
      x[p] = c;
      if (pr.energy(x) < e - 1e-9) return false;
    }
    x[p] = keep;
  }
  return true;
}

}  // namespace

TEST_CASE("energy of a hand-sized problem") {
  AssignmentProblem pr;
  pr.tracklets = 3;
  pr.columns = 2;
  pr.unary = {1, 5, 2, 0, 3, 4};
  pr.label_cost = {10, 0};
  pr.edges = {{0, 1, 1.0, 0.0}, {1, 2, 2.0, 0.0}};
  pr.lambda = 0.5;
  const std::vector<int> x{0, 1, 0};
  CHECK(pr.energy(x) == doctest::Approx(1 + 0 + 3 + 0.5 * 1 + 0.5 * 2 + 10));
}

TEST_CASE("exact solver reaches the brute-force minimum") {
  std::mt19937_64 gen(61);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pr = random_problem(gen, 1 + trial % 8, 2 + trial % 3);
    const auto x = minimize_exact(pr, std::vector<int>(pr.tracklets, pr.columns - 1));
    CHECK(pr.energy(x) == doctest::Approx(brute_force(pr)).epsilon(1e-12));
  }
}

TEST_CASE("local strategies never increase energy and stop at single-move minima") {
  std::mt19937_64 gen(62);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pr = random_problem(gen, 2 + trial % 9, 2 + trial % 4);
    std::vector<int> start(pr.tracklets, pr.columns - 1);
    const double e0 = pr.energy(start);
    for (auto strategy : {AssignmentStrategy::Icm, AssignmentStrategy::Expansion, AssignmentStrategy::Auto}) {
      const auto x = minimize(pr, start, strategy);
      CHECK(pr.energy(x) <= e0 + 1e-9);
      CHECK(single_move_minimum(pr, x));
    }
  }
}

TEST_CASE("expansion is within twice the optimum without label costs") {
  // the classic Potts bound; label costs are what make the general case harder
  std::mt19937_64 gen(63);
  for (int trial = 0; trial < 100; ++trial) {
    auto pr = random_problem(gen, 8, 4);
    std::fill(pr.label_cost.begin(), pr.label_cost.end(), 0.0);
    std::replace(pr.unary.begin(), pr.unary.end(), kernels::kInfinity, 50.0);
    const auto x = minimize_expansion(pr, std::vector<int>(pr.tracklets, pr.columns - 1));
    CHECK(pr.energy(x) <= 2 * brute_force(pr) + 1e-9);
  }
}

TEST_CASE("assign_labels attains the exhaustive minimum on small windows") {
  std::mt19937_64 gen(64);
  const SceneConfig cfg = testing::desk(0.5, 0.1);
  const Scene scene = generate_scene(cfg, 7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = testing::small_instance(gen, cfg.intrinsics, scene, 8, 3);
    std::vector<Label> candidates = inst.labeling.labels;
    LabelId next = inst.labeling.next_id;
    for (Label l : inst.proposals) {
      l.id = next++;
      candidates.push_back(l);
    }
    const ResidualTable table = residual_table(inst.window, candidates, inst.params);
    const double oracle = testing::exhaustive_minimum(table, candidates, inst.graph, inst.params);

    AssignTrace trace;
    const Labeling out = assign_labels(inst.window, inst.labeling, inst.proposals, inst.graph, inst.params,
                                       AssignmentStrategy::Auto, &trace);
    const double got = energy_from_table(table, candidates, out.assignment, inst.graph, inst.params).total();
    CHECK(got == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(trace.energy_after == doctest::Approx(got).epsilon(1e-12));
    CHECK(trace.energy_after <= trace.energy_before + 1e-9);
    // every surviving label has support
    for (const Label& l : out.labels) CHECK_FALSE(out.support(l.id).empty());
  }
}
