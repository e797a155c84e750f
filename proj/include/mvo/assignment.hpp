#pragma once

#include "mvo/labeling.hpp"
#include "mvo/tracklet_graph.hpp"

#include <span>
#include <vector>

namespace mvo {

/// Discrete labeling problem in column form: unary costs per (tracklet,
/// column), Potts smoothness over graph edges, and a cost per used column.
struct AssignmentProblem {
  int tracklets = 0;
  int columns = 0;
  std::vector<double> unary;       // tracklets x columns, row-major; may be +inf
  std::vector<double> label_cost;  // per column
  std::vector<GraphEdge> edges;
  double lambda = 1.0;

  double cost(int p, int c) const { return unary[static_cast<std::size_t>(p) * columns + c]; }
  double energy(std::span<const int> x) const;
};

enum class AssignmentStrategy {
  Icm,        // single-tracklet moves to a local minimum
  Expansion,  // alpha-expansion moves (min-cut) followed by ICM
  Auto,       // exact branch and bound when the search space is tiny, else Expansion
};

/// All strategies return an assignment with energy <= energy(initial) that is
/// a local minimum under single-tracklet moves.
std::vector<int> minimize_icm(const AssignmentProblem& problem, std::vector<int> x);
std::vector<int> minimize_expansion(const AssignmentProblem& problem, std::vector<int> x);
std::vector<int> minimize_exact(const AssignmentProblem& problem, std::vector<int> x);
std::vector<int> minimize(const AssignmentProblem& problem, std::vector<int> x, AssignmentStrategy strategy);

/// Search-space size below which Auto uses the exact solver.
inline constexpr double kExactSearchLimit = 2.0e6;

struct AssignTrace {
  double energy_before = 0.0;  // incoming assignment, candidate label set
  double energy_after = 0.0;   // returned assignment, candidate label set
};

/// Re-assigns every tracklet over labeling.labels + proposals + outlier,
/// minimising the total energy. Proposals receive fresh ids; labels left
/// without support are dropped from the result.
Labeling assign_labels(const Window& w, const Labeling& labeling, std::vector<Label> proposals,
                       const NeighborhoodGraph& graph, const EnergyParams& params,
                       AssignmentStrategy strategy = AssignmentStrategy::Auto, AssignTrace* trace = nullptr);

}  // namespace mvo
