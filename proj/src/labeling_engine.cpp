#include "mvo/labeling_engine.hpp"

#include "mvo/error.hpp"
#include "mvo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>

namespace mvo {

namespace {

constexpr std::uint64_t kProposePurpose = 0x70726f706f7365ULL;
constexpr std::uint64_t kBaselinePurpose = 0x626173656c696eULL;

// Upper bound on models peeled from one outlier component per iteration.
constexpr int kMaxPeels = 8;

// Local proposals: at most this many seeds per component, each a graph ball
// of this many times the minimum support.
constexpr int kMaxLocalSeeds = 12;
constexpr int kLocalBallFactor = 4;

const std::optional<MotionEstimate> kNoEstimate;

// Breadth-first ball around `seed` inside the sorted vertex set `allowed`,
// stopping at `size` vertices. Returned sorted.
std::vector<int> graph_ball(const NeighborhoodGraph& graph, const std::vector<int>& allowed, int seed, int size) {
  std::set<int> seen{seed};
  std::vector<int> frontier{seed};
  for (std::size_t head = 0; head < frontier.size() && static_cast<int>(seen.size()) < size; ++head) {
    for (int n : graph.neighbors(frontier[head])) {
      if (static_cast<int>(seen.size()) >= size) break;
      if (seen.count(n) || !std::binary_search(allowed.begin(), allowed.end(), n)) continue;
      seen.insert(n);
      frontier.push_back(n);
    }
  }
  return {seen.begin(), seen.end()};
}

std::vector<int> all_indices(const Window& w) {
  std::vector<int> out(w.tracklets.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
  return out;
}

int label_index(const std::vector<Label>& labels, LabelId id) {
  auto it = std::lower_bound(labels.begin(), labels.end(), id, [](const Label& l, LabelId v) { return l.id < v; });
  return it != labels.end() && it->id == id ? static_cast<int>(it - labels.begin()) : -1;
}

void recompute_outlier(ResidualTable& t, const EnergyParams& params) {
  for (int i = 0; i < t.rows; ++i) {
    double best = kernels::kInfinity;
    for (int c = 0; c < t.cols; ++c) best = std::min(best, t.at(i, c));
    t.outlier[i] = std::isfinite(best) ? params.alpha * std::exp(-best / params.beta) : 0.0;
  }
}

// Table for `labels` after replacing column `keep` by `column` and dropping
// column `drop`.
ResidualTable merged_table(const ResidualTable& base, int keep, int drop, const std::vector<double>& column,
                           const EnergyParams& params) {
  ResidualTable t;
  t.rows = base.rows;
  t.cols = base.cols - 1;
  t.values.resize(static_cast<std::size_t>(t.rows) * t.cols);
  t.outlier.resize(t.rows);
  for (int i = 0; i < t.rows; ++i) {
    int out = 0;
    for (int c = 0; c < base.cols; ++c) {
      if (c == drop) continue;
      t.values[static_cast<std::size_t>(i) * t.cols + out++] = c == keep ? column[i] : base.at(i, c);
    }
  }
  recompute_outlier(t, params);
  return t;
}

}  // namespace

const std::optional<MotionEstimate>& MotionCache::get(const Window& w, std::span<const int> subset,
                                                      const EnergyParams& params) {
  const std::uint64_t h = hash_subset(w, subset);
  auto it = entries_.find(h);
  if (it != entries_.end()) return it->second;
  auto est = estimate_motion(w, subset, params, hash_key({seed_, kProposePurpose, h}));
  return entries_.emplace(h, std::move(est)).first->second;
}

bool MotionCache::first_proposal(const Window& w, std::span<const int> subset) {
  return proposed_.insert(hash_subset(w, subset)).second;
}

ProposalSet propose_labels(const Window& w, const Labeling& labeling, const NeighborhoodGraph& graph,
                           const EnergyParams& params, MotionCache& cache) {
  ProposalSet out;
  std::set<int> marked;

  for (const Label& label : labeling.labels) {
    const std::vector<int> support = labeling.support(label.id);
    for (const std::vector<int>& comp : connected_components(graph, support)) {
      if (comp.size() < 3 || hash_subset(w, comp) == label.source || !cache.first_proposal(w, comp)) continue;
      const auto& est = cache.get(w, comp, params);
      if (!est || est->inliers.empty()) continue;
      out.labels.push_back(est->label);
      marked.insert(est->outliers.begin(), est->outliers.end());
    }
  }

  // O goes last; anything marked above joins it
  std::vector<int> pool = labeling.support(kOutlier);
  pool.insert(pool.end(), marked.begin(), marked.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  for (const std::vector<int>& comp : connected_components(graph, pool)) {
    if (!cache.first_proposal(w, comp)) continue;
    std::vector<int> rest = comp;
    int peel = 0;
    for (; peel < kMaxPeels && static_cast<int>(rest.size()) >= params.min_support_points; ++peel) {
      const auto& est = cache.get(w, rest, params);
      if (!est || static_cast<int>(est->inliers.size()) < params.min_support_points) break;
      out.labels.push_back(est->label);
      rest = est->outliers;
    }
    // A mixed pool can defeat the frame-pair RANSAC because the dominant
    // motion changes from frame to frame. Small graph balls rarely span two
    // bodies, so they seed the remaining proposals.
    for (int seeds = 0; peel < kMaxPeels && seeds < kMaxLocalSeeds &&
                        static_cast<int>(rest.size()) >= params.min_support_points;
         ++seeds) {
      const std::vector<int> ball = graph_ball(graph, rest, rest.front(), kLocalBallFactor * params.min_support_points);
      std::vector<int> drop = ball;
      const auto& est = static_cast<int>(ball.size()) >= params.min_support_points ? cache.get(w, ball, params)
                                                                                  : kNoEstimate;
      if (est && static_cast<int>(est->inliers.size()) >= params.min_support_points) {
        out.labels.push_back(est->label);
        ++peel;
        const kernels::StepChain chain = est->label.steps();
        for (int i : rest) {
          const auto r = kernels::max_transfer_error(w.intrinsics, w.tracklets[i], chain);
          if (r && *r < params.inlier_threshold) drop.push_back(i);
        }
        std::sort(drop.begin(), drop.end());
      }
      std::vector<int> next;
      std::set_difference(rest.begin(), rest.end(), drop.begin(), drop.end(), std::back_inserter(next));
      rest = std::move(next);
    }
  }

  out.outliers.assign(marked.begin(), marked.end());
  return out;
}

Labeling merge_labels(const Window& w, const Labeling& labeling, const NeighborhoodGraph& graph,
                      const EnergyParams& params, MotionCache& cache, bool adjacent_only, RunTrace* trace,
                      int iteration) {
  Labeling cur = labeling;
  for (;;) {
    const int L = static_cast<int>(cur.labels.size());
    if (L < 2) break;

    std::set<std::pair<int, int>> pairs;  // label indices, first < second
    if (adjacent_only) {
      for (const GraphEdge& e : graph.edges()) {
        const LabelId a = cur.assignment[e.p], b = cur.assignment[e.q];
        if (a == b || a == kOutlier || b == kOutlier) continue;
        pairs.insert(std::minmax(label_index(cur.labels, a), label_index(cur.labels, b)));
      }
    } else {
      for (int a = 0; a < L; ++a) {
        for (int b = a + 1; b < L; ++b) pairs.insert({a, b});
      }
    }
    if (pairs.empty()) break;

    const ResidualTable base = residual_table(w, cur.labels, params);
    const double e0 = energy_from_table(base, cur.labels, cur.assignment, graph, params).total();

    double best_delta = 0.0;
    std::optional<Labeling> best;
    for (const auto& [ia, ib] : pairs) {
      std::vector<int> sa = cur.support(cur.labels[ia].id), sb = cur.support(cur.labels[ib].id);
      std::vector<int> joint;
      std::merge(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(joint));
      const auto& est = cache.get(w, joint, params);
      if (!est) continue;

      // survivor keeps its id: larger support, then lower id
      const int keep = sa.size() >= sb.size() ? ia : ib;
      const int drop = keep == ia ? ib : ia;
      Label merged = est->label;
      merged.id = cur.labels[keep].id;

      const std::vector<kernels::StepChain> chain{merged.steps()};
      const std::vector<double> column = kernels::residual_matrix_parallel(w.intrinsics, w.tracklets, chain);
      const ResidualTable table = merged_table(base, keep, drop, column, params);

      Labeling cand;
      cand.next_id = cur.next_id;
      for (int c = 0; c < L; ++c) {
        if (c == drop) continue;
        cand.labels.push_back(c == keep ? merged : cur.labels[c]);
      }
      cand.assignment = cur.assignment;
      const LabelId dropped_id = cur.labels[drop].id;
      for (LabelId& a : cand.assignment) {
        if (a == dropped_id) a = merged.id;
      }
      const double e1 = energy_from_table(table, cand.labels, cand.assignment, graph, params).total();
      const double delta = e1 - e0;
      if (delta < best_delta - 1e-9 * std::max(1.0, std::abs(e0))) {
        best_delta = delta;
        best = std::move(cand);
      }
    }
    if (!best) break;
    if (trace) trace->steps.push_back({EnergyStep::Kind::Merge, iteration, e0, e0 + best_delta});
    cur = std::move(*best);
  }
  return cur;
}

Labeling sanitize(const Window& w, const Labeling& labeling, const NeighborhoodGraph& graph,
                  const EnergyParams& params, MotionCache& cache) {
  Labeling out = merge_labels(w, labeling, graph, params, cache, false);

  auto dissolve_small = [&](Labeling& l) {
    for (const Label& label : l.labels) {
      const std::vector<int> support = l.support(label.id);
      if (static_cast<int>(support.size()) >= params.min_support_points && label.span() >= params.min_support_frames) {
        continue;
      }
      for (int i : support) l.assignment[i] = kOutlier;
    }
    l.prune_empty();
  };
  dissolve_small(out);

  for (std::size_t i = 0; i < out.assignment.size(); ++i) {
    const Label* label = out.find(out.assignment[i]);
    if (!label) continue;
    const auto r = label_residual(w.intrinsics, w.tracklets[i], *label);
    if (!r || *r > params.inlier_threshold) out.assignment[i] = kOutlier;
  }
  // the residual pass can push a label back under the support minimum
  dissolve_small(out);
  return out;
}

Labeling run_window(const Window& w, const EnergyParams& params, std::uint64_t seed, RunTrace* trace,
                    AssignmentStrategy strategy) {
  params.validate();
  if (w.tracklets.empty()) throw Error(ErrorCode::NoModelsFound, "window has no tracklets");

  const NeighborhoodGraph graph = build_graph(w.tracklets, params.k_nn);
  MotionCache cache(seed);
  Labeling labeling;
  labeling.assignment.assign(w.tracklets.size(), kOutlier);

  RunTrace local;
  RunTrace& t = trace ? *trace : local;
  for (int iter = 0; iter < params.max_outer_iterations; ++iter) {
    const std::vector<LabelId> previous = labeling.assignment;
    ProposalSet proposals = propose_labels(w, labeling, graph, params, cache);
    for (int i : proposals.outliers) labeling.assignment[i] = kOutlier;

    AssignTrace at;
    labeling = assign_labels(w, labeling, std::move(proposals.labels), graph, params, strategy, &at);
    t.steps.push_back({EnergyStep::Kind::Assign, iter, at.energy_before, at.energy_after});
    labeling = merge_labels(w, labeling, graph, params, cache, true, &t, iter);
    t.iterations = iter + 1;
    if (labeling.assignment == previous) {
      t.converged = true;
      break;
    }
  }

  labeling = sanitize(w, labeling, graph, params, cache);
  if (labeling.labels.empty()) throw Error(ErrorCode::NoModelsFound, "no label survived sanitization");
  return labeling;
}

Labeling sequential_ransac_baseline(const Window& w, const EnergyParams& params, std::uint64_t seed) {
  params.validate();
  Labeling out;
  out.assignment.assign(w.tracklets.size(), kOutlier);
  std::vector<int> remaining = all_indices(w);
  for (std::uint64_t round = 0; static_cast<int>(remaining.size()) >= params.min_support_points; ++round) {
    const auto est = estimate_motion(w, remaining, params, hash_key({seed, kBaselinePurpose, round}));
    if (!est || static_cast<int>(est->inliers.size()) < params.min_support_points) break;
    const LabelId id = out.add(est->label);
    for (int i : est->inliers) out.assignment[i] = id;
    remaining = est->outliers;
  }
  return out;
}

}  // namespace mvo
