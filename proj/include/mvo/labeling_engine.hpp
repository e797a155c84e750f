#pragma once

#include "mvo/assignment.hpp"
#include "mvo/frame_ransac.hpp"
#include "mvo/labeling.hpp"
#include "mvo/tracklet_graph.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace mvo {

/// Memoised estimate_motion keyed by (seed, tracklet set). Estimates depend
/// only on the set, so proposals and merges that revisit a support reuse them.
class MotionCache {
 public:
  explicit MotionCache(std::uint64_t seed) : seed_(seed) {}

  const std::optional<MotionEstimate>& get(const Window& w, std::span<const int> subset, const EnergyParams& params);
  std::size_t size() const { return entries_.size(); }

  /// True the first time a support set is offered as a proposal source.
  bool first_proposal(const Window& w, std::span<const int> subset);

 private:
  std::uint64_t seed_;
  std::map<std::uint64_t, std::optional<MotionEstimate>> entries_;
  std::set<std::uint64_t> proposed_;
};

struct ProposalSet {
  std::vector<Label> labels;
  std::vector<int> outliers;  // tracklet indices marked for O, sorted
};

/// Splits every label's support into graph components and re-estimates each;
/// then does the same for O, peeling successive models off each outlier
/// component. When a peel finds too little support, the rest of the
/// component is covered by proposals estimated on small graph balls. A component already used as a proposal source in an earlier
/// call (same cache) is skipped, since it would yield the same labels again.
ProposalSet propose_labels(const Window& w, const Labeling& labeling, const NeighborhoodGraph& graph,
                           const EnergyParams& params, MotionCache& cache);

struct EnergyStep {
  enum class Kind { Assign, Merge };
  Kind kind = Kind::Assign;
  int iteration = 0;
  double before = 0.0;
  double after = 0.0;
};

struct RunTrace {
  std::vector<EnergyStep> steps;
  int iterations = 0;
  bool converged = false;
};

/// Greedy merging: each round re-estimates every candidate pair on its union
/// support and applies the single best strictly energy-decreasing merge.
/// With `adjacent_only` only pairs joined by a graph edge are candidates.
Labeling merge_labels(const Window& w, const Labeling& labeling, const NeighborhoodGraph& graph,
                      const EnergyParams& params, MotionCache& cache, bool adjacent_only = true,
                      RunTrace* trace = nullptr, int iteration = 0);

/// Unrestricted merges, then dissolves labels below the support/span minimums,
/// then moves tracklets with residual > e_th to O.
Labeling sanitize(const Window& w, const Labeling& labeling, const NeighborhoodGraph& graph,
                  const EnergyParams& params, MotionCache& cache);

/// Full fitting loop for one window. Throws Error(NoModelsFound) when
/// sanitisation leaves no label.
Labeling run_window(const Window& w, const EnergyParams& params, std::uint64_t seed, RunTrace* trace = nullptr,
                    AssignmentStrategy strategy = AssignmentStrategy::Auto);

/// Torr-style sequential RANSAC: fit the dominant model, peel its inliers,
/// repeat on the rest.
Labeling sequential_ransac_baseline(const Window& w, const EnergyParams& params, std::uint64_t seed);

}  // namespace mvo
