#include "mvo/assignment.hpp"

#include "mvo/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mvo {

namespace {

constexpr double kInfiniteCapacity = 1e12;
constexpr int kMaxCycles = 20;

struct Adjacency {
  std::vector<std::vector<std::pair<int, double>>> list;  // (neighbour, lambda * weight)

  explicit Adjacency(const AssignmentProblem& pr) : list(pr.tracklets) {
    for (const GraphEdge& e : pr.edges) {
      list[e.p].push_back({e.q, pr.lambda * e.weight});
      list[e.q].push_back({e.p, pr.lambda * e.weight});
    }
  }
};

bool improves(double candidate, double incumbent) {
  if (!std::isfinite(incumbent)) return candidate < incumbent;
  return candidate < incumbent - 1e-9 * std::max(1.0, std::abs(incumbent));
}

// One ICM sweep set; returns true if anything moved.
bool icm_sweeps(const AssignmentProblem& pr, const Adjacency& adj, std::vector<int>& x) {
  std::vector<int> count(pr.columns, 0);
  for (int c : x) ++count[c];
  bool any = false;
  for (int sweep = 0; sweep < 1000; ++sweep) {
    bool moved = false;
    for (int p = 0; p < pr.tracklets; ++p) {
      const int a = x[p];
      const double base = pr.cost(p, a);
      int best = a;
      double best_delta = 0.0;
      for (int c = 0; c < pr.columns; ++c) {
        if (c == a || !std::isfinite(pr.cost(p, c))) continue;
        double delta = std::isfinite(base) ? pr.cost(p, c) - base : -std::numeric_limits<double>::infinity();
        for (const auto& [q, w] : adj.list[p]) delta += w * ((c != x[q]) - (a != x[q]));
        if (count[c] == 0) delta += pr.label_cost[c];
        if (count[a] == 1) delta -= pr.label_cost[a];
        if (delta < best_delta - 1e-12) {
          best_delta = delta;
          best = c;
        }
      }
      if (best != a) {
        --count[a];
        ++count[best];
        x[p] = best;
        moved = true;
      }
    }
    if (!moved) break;
    any = true;
  }
  return any;
}

double clamp_cost(double v) { return std::isfinite(v) ? std::min(v, kInfiniteCapacity) : kInfiniteCapacity; }

// Best expansion of column `alpha` from x; returns the candidate assignment.
std::vector<int> expansion_move(const AssignmentProblem& pr, const std::vector<int>& x, int alpha) {
  MaxFlow flow(pr.tracklets);
  for (int p = 0; p < pr.tracklets; ++p) {
    const double keep = clamp_cost(pr.cost(p, x[p]));
    const double take = x[p] == alpha ? keep : clamp_cost(pr.cost(p, alpha));
    flow.add_terminal(p, take, keep);
  }
  for (const GraphEdge& e : pr.edges) {
    const double w = pr.lambda * e.weight;
    const int lp = x[e.p], lq = x[e.q];
    const double a = w * (lp != lq);     // keep, keep
    const double b = w * (lp != alpha);  // keep, take
    const double c = w * (alpha != lq);  // take, keep
    // d = 0 (take, take)
    // E = a + (c - a) x_p + (0 - c) x_q + (b + c - a) (1 - x_p) x_q
    const double lin_p = c - a, lin_q = -c;
    flow.add_terminal(e.p, std::max(lin_p, 0.0), std::max(-lin_p, 0.0));
    flow.add_terminal(e.q, std::max(lin_q, 0.0), std::max(-lin_q, 0.0));
    const double k = b + c - a;
    if (k > 0) flow.add_edge(e.p, e.q, k);
  }
  flow.solve();
  std::vector<int> out = x;
  for (int p = 0; p < pr.tracklets; ++p) {
    if (!flow.in_source_set(p)) out[p] = alpha;
  }
  return out;
}

}  // namespace

double AssignmentProblem::energy(std::span<const int> x) const {
  double e = 0.0;
  std::vector<char> used(columns, 0);
  for (int p = 0; p < tracklets; ++p) {
    e += cost(p, x[p]);
    used[x[p]] = 1;
  }
  for (const GraphEdge& edge : edges) {
    if (x[edge.p] != x[edge.q]) e += lambda * edge.weight;
  }
  for (int c = 0; c < columns; ++c) {
    if (used[c]) e += label_cost[c];
  }
  return e;
}

std::vector<int> minimize_icm(const AssignmentProblem& problem, std::vector<int> x) {
  const Adjacency adj(problem);
  icm_sweeps(problem, adj, x);
  return x;
}

std::vector<int> minimize_expansion(const AssignmentProblem& problem, std::vector<int> x) {
  const Adjacency adj(problem);
  double current = problem.energy(x);
  for (int cycle = 0; cycle < kMaxCycles; ++cycle) {
    bool changed = false;
    for (int alpha = 0; alpha < problem.columns; ++alpha) {
      std::vector<int> candidate = expansion_move(problem, x, alpha);
      const double e = problem.energy(candidate);
      if (improves(e, current)) {
        x = std::move(candidate);
        current = e;
        changed = true;
      }
    }
    if (icm_sweeps(problem, adj, x)) {
      current = problem.energy(x);
      changed = true;
    }
    if (!changed) break;
  }
  return x;
}

std::vector<int> minimize_exact(const AssignmentProblem& problem, std::vector<int> x) {
  const int n = problem.tracklets, m = problem.columns;
  const Adjacency adj(problem);
  // cheapest unary of every suffix, as an admissible bound on what is left
  std::vector<double> suffix(n + 1, 0.0);
  for (int p = n - 1; p >= 0; --p) {
    double lo = std::numeric_limits<double>::infinity();
    for (int c = 0; c < m; ++c) lo = std::min(lo, problem.cost(p, c));
    suffix[p] = suffix[p + 1] + lo;
  }

  std::vector<int> best = x;
  double best_energy = problem.energy(x);
  std::vector<int> cur(n, -1);
  std::vector<int> count(m, 0);

  auto search = [&](auto&& self, int p, double partial) -> void {
    if (p == n) {
      if (improves(partial, best_energy)) {
        best_energy = partial;
        best = cur;
      }
      return;
    }
    for (int c = 0; c < m; ++c) {
      const double u = problem.cost(p, c);
      if (!std::isfinite(u)) continue;
      double add = u;
      for (const auto& [q, w] : adj.list[p]) {
        if (q < p && cur[q] != c) add += w;
      }
      if (count[c] == 0) add += problem.label_cost[c];
      const double bound = partial + add + suffix[p + 1];
      if (!improves(bound, best_energy)) continue;
      cur[p] = c;
      ++count[c];
      self(self, p + 1, partial + add);
      --count[c];
      cur[p] = -1;
    }
  };
  search(search, 0, 0.0);
  return best;
}

std::vector<int> minimize(const AssignmentProblem& problem, std::vector<int> x, AssignmentStrategy strategy) {
  switch (strategy) {
    case AssignmentStrategy::Icm:
      return minimize_icm(problem, std::move(x));
    case AssignmentStrategy::Expansion:
      return minimize_expansion(problem, std::move(x));
    case AssignmentStrategy::Auto:
      if (problem.tracklets * std::log(std::max(problem.columns, 1)) < std::log(kExactSearchLimit)) {
        return minimize_exact(problem, std::move(x));
      }
      return minimize_expansion(problem, std::move(x));
  }
  return x;
}

Labeling assign_labels(const Window& w, const Labeling& labeling, std::vector<Label> proposals,
                       const NeighborhoodGraph& graph, const EnergyParams& params, AssignmentStrategy strategy,
                       AssignTrace* trace) {
  Labeling out = labeling;
  for (Label& p : proposals) out.add(std::move(p));
  std::sort(out.labels.begin(), out.labels.end(), [](const Label& a, const Label& b) { return a.id < b.id; });

  const ResidualTable table = residual_table(w, out.labels, params);
  const int labels = static_cast<int>(out.labels.size());
  AssignmentProblem pr;
  pr.tracklets = table.rows;
  pr.columns = labels + 1;
  pr.unary.resize(static_cast<std::size_t>(pr.tracklets) * pr.columns);
  for (int p = 0; p < pr.tracklets; ++p) {
    for (int c = 0; c < labels; ++c) pr.unary[static_cast<std::size_t>(p) * pr.columns + c] = table.at(p, c);
    pr.unary[static_cast<std::size_t>(p) * pr.columns + labels] = table.outlier[p];
  }
  pr.label_cost.assign(pr.columns, params.label_cost);
  pr.label_cost[labels] = 0.0;
  pr.edges = graph.edges();
  pr.lambda = params.lambda;

  std::vector<int> x(pr.tracklets, labels);
  for (int p = 0; p < pr.tracklets; ++p) {
    const LabelId a = out.assignment[p];
    if (a == kOutlier) continue;
    auto it = std::lower_bound(out.labels.begin(), out.labels.end(), a,
                               [](const Label& l, LabelId v) { return l.id < v; });
    if (it != out.labels.end() && it->id == a) x[p] = static_cast<int>(it - out.labels.begin());
  }
  if (trace) trace->energy_before = pr.energy(x);
  x = minimize(pr, std::move(x), strategy);
  if (trace) trace->energy_after = pr.energy(x);

  for (int p = 0; p < pr.tracklets; ++p) out.assignment[p] = x[p] == labels ? kOutlier : out.labels[x[p]].id;
  out.prune_empty();
  return out;
}

}  // namespace mvo
