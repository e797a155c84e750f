#include "mvo/labeling.hpp"

#include "mvo/error.hpp"
#include "mvo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mvo {

Window make_window(const StereoIntrinsics& K, const std::vector<Tracklet>& all, int start, int length) {
  Window w;
  w.intrinsics = K;
  w.frames = length;
  w.tracklets = extract_window(all, start, length);
  std::sort(w.tracklets.begin(), w.tracklets.end(), [](const Tracklet& a, const Tracklet& b) { return a.id < b.id; });
  return w;
}

int Label::first_frame() const {
  for (int k = 0; k < static_cast<int>(poses.size()); ++k) {
    if (poses[k]) return k;
  }
  return -1;
}

int Label::last_frame() const {
  for (int k = static_cast<int>(poses.size()) - 1; k >= 0; --k) {
    if (poses[k]) return k;
  }
  return -1;
}

int Label::span() const {
  return static_cast<int>(std::count_if(poses.begin(), poses.end(), [](const auto& p) { return p.has_value(); }));
}

kernels::StepChain Label::steps() const {
  kernels::StepChain out(poses.size());
  for (std::size_t k = 1; k < poses.size(); ++k) {
    if (poses[k] && poses[k - 1]) out[k] = *poses[k] * poses[k - 1]->inverse();
  }
  return out;
}

void EnergyParams::validate() const {
  auto require = [](bool ok, const char* field, const char* rule) {
    if (!ok) throw Error(ErrorCode::ConfigInvalid, std::string("pipeline.") + field + " " + rule);
  };
  require(lambda > 0.0, "lambda", "must be > 0");
  require(label_cost > 0.0, "label_cost", "must be > 0");
  require(alpha > 0.0, "alpha", "must be > 0");
  require(beta > 0.0, "beta", "must be > 0");
  require(inlier_threshold > 0.0, "e_th", "must be > 0");
  require(k_nn >= 1, "k_nn", "must be >= 1");
  require(ransac_iterations >= 1, "ransac_iterations", "must be >= 1");
  require(min_support_points >= 1, "min_support_points", "must be >= 1");
  require(min_support_frames >= 1, "min_support_frames", "must be >= 1");
  require(max_outer_iterations >= 1, "max_outer_iterations", "must be >= 1");
}

const Label* Labeling::find(LabelId id) const {
  auto it = std::lower_bound(labels.begin(), labels.end(), id, [](const Label& l, LabelId v) { return l.id < v; });
  return it != labels.end() && it->id == id ? &*it : nullptr;
}

std::vector<int> Labeling::support(LabelId id) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(assignment.size()); ++i) {
    if (assignment[i] == id) out.push_back(i);
  }
  return out;
}

OutlierLabel Labeling::outlier(const Window& w) const {
  OutlierLabel o;
  for (int i : support(kOutlier)) o.support.push_back(w.tracklets[i].id);
  return o;
}

void Labeling::prune_empty() {
  std::vector<char> used(labels.size(), 0);
  for (LabelId a : assignment) {
    if (a == kOutlier) continue;
    auto it = std::lower_bound(labels.begin(), labels.end(), a, [](const Label& l, LabelId v) { return l.id < v; });
    if (it != labels.end() && it->id == a) used[it - labels.begin()] = 1;
  }
  std::vector<Label> kept;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (used[i]) kept.push_back(std::move(labels[i]));
  }
  labels = std::move(kept);
}

LabelId Labeling::add(Label label) {
  label.id = next_id++;
  labels.push_back(std::move(label));
  return labels.back().id;
}

std::optional<double> frame_residual(const StereoIntrinsics& K, const Tracklet& p, const Label& label, int frame) {
  if (frame < 1 || !label.spans(frame) || !label.spans(frame - 1)) return std::nullopt;
  const TrackletFrame* prev = p.at(frame - 1);
  const TrackletFrame* cur = p.at(frame);
  if (!prev || !cur) return std::nullopt;
  const Pose step = *label.poses[frame] * label.poses[frame - 1]->inverse();
  return kernels::transfer_error(K, step, prev->point, cur->obs);
}

std::optional<double> label_residual(const StereoIntrinsics& K, const Tracklet& p, const Label& label) {
  return kernels::max_transfer_error(K, p, label.steps());
}

double outlier_residual(const StereoIntrinsics& K, const Tracklet& p, std::span<const Label> labels, double alpha,
                        double beta) {
  std::optional<double> best;
  for (const Label& l : labels) {
    const auto r = label_residual(K, p, l);
    if (r && (!best || *r < *best)) best = r;
  }
  return best ? alpha * std::exp(-*best / beta) : 0.0;
}

ResidualTable residual_table(const Window& w, std::span<const Label> labels, const EnergyParams& params) {
  std::vector<kernels::StepChain> chains;
  chains.reserve(labels.size());
  for (const Label& l : labels) chains.push_back(l.steps());
  ResidualTable t;
  t.rows = static_cast<int>(w.tracklets.size());
  t.cols = static_cast<int>(labels.size());
  t.values = kernels::residual_matrix_parallel(w.intrinsics, w.tracklets, chains);
  t.outlier.assign(t.rows, 0.0);
  for (int i = 0; i < t.rows; ++i) {
    double best = kernels::kInfinity;
    for (int c = 0; c < t.cols; ++c) best = std::min(best, t.at(i, c));
    t.outlier[i] = std::isfinite(best) ? params.alpha * std::exp(-best / params.beta) : 0.0;
  }
  return t;
}

EnergyTerms energy_from_table(const ResidualTable& table, std::span<const Label> labels,
                              std::span<const LabelId> assignment, const NeighborhoodGraph& graph,
                              const EnergyParams& params) {
  EnergyTerms e;
  std::vector<char> used(labels.size(), 0);
  for (int i = 0; i < table.rows; ++i) {
    const LabelId a = assignment[i];
    if (a == kOutlier) {
      e.residual += table.outlier[i];
      continue;
    }
    auto it = std::lower_bound(labels.begin(), labels.end(), a, [](const Label& l, LabelId v) { return l.id < v; });
    if (it == labels.end() || it->id != a) {
      e.residual += kernels::kInfinity;
      continue;
    }
    const auto c = static_cast<int>(it - labels.begin());
    used[c] = 1;
    e.residual += table.at(i, c);
  }
  for (const GraphEdge& edge : graph.edges()) {
    if (assignment[edge.p] != assignment[edge.q]) e.smoothness += params.lambda * edge.weight;
  }
  for (char u : used) {
    if (u) e.complexity += params.label_cost;
  }
  return e;
}

EnergyTerms total_energy(const Window& w, const Labeling& labeling, const NeighborhoodGraph& graph,
                         const EnergyParams& params) {
  const ResidualTable table = residual_table(w, labeling.labels, params);
  return energy_from_table(table, labeling.labels, labeling.assignment, graph, params);
}

std::uint64_t hash_subset(const Window& w, std::span<const int> subset) {
  std::vector<TrackletId> ids;
  ids.reserve(subset.size());
  for (int i : subset) ids.push_back(w.tracklets[i].id);
  std::sort(ids.begin(), ids.end());
  std::uint64_t h = splitmix64(ids.size());
  for (TrackletId id : ids) h = splitmix64(h ^ static_cast<std::uint64_t>(id));
  return h;
}

}  // namespace mvo
