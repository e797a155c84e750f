#include "mvo/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace mvo::kernels {

std::optional<double> max_transfer_error(const StereoIntrinsics& K, const Tracklet& t, const StepChain& steps) {
  std::optional<double> worst;
  const int lo = std::max(t.first_frame + 1, 1);
  const int hi = std::min(t.last_frame(), static_cast<int>(steps.size()) - 1);
  for (int k = lo; k <= hi; ++k) {
    if (!steps[k]) continue;
    const TrackletFrame* prev = t.at(k - 1);
    const TrackletFrame* cur = t.at(k);
    if (!prev || !cur) continue;
    const double e = transfer_error(K, *steps[k], prev->point, cur->obs);
    if (!worst || e > *worst) worst = e;
  }
  return worst;
}

double tracklet_distance(const Tracklet& p, const Tracklet& q) {
  const int lo = std::max(p.first_frame, q.first_frame);
  const int hi = std::min(p.last_frame(), q.last_frame());
  bool coexist = false;
  double worst = 0.0;
  for (int k = lo; k <= hi; ++k) {
    const TrackletFrame* a = p.at(k);
    const TrackletFrame* b = q.at(k);
    if (!a || !b) continue;
    coexist = true;
    worst = std::max(worst, std::hypot(a->obs.u - b->obs.u, a->obs.v - b->obs.v));
  }
  return coexist ? worst : kInfinity;
}

namespace {

// Distance at one frame is a lower bound on the max-over-frames distance, so
// candidates are visited in lower-bound order and the scan stops once the
// bound passes the k-th best exact distance. Same result as a full scan.
std::vector<Neighbor> nearest_of(std::span<const Tracklet> tracklets, int i, int k) {
  const Tracklet& p = tracklets[i];
  int probe = p.first_frame + static_cast<int>(p.frames.size()) / 2;
  while (!p.at(probe)) ++probe;
  const TrackletFrame* pf = p.at(probe);

  std::vector<Neighbor> order;
  order.reserve(tracklets.size());
  for (int j = 0; j < static_cast<int>(tracklets.size()); ++j) {
    if (j == i) continue;
    const Tracklet& q = tracklets[j];
    if (q.last_frame() < p.first_frame || q.first_frame > p.last_frame()) continue;
    const TrackletFrame* qf = q.at(probe);
    order.push_back({j, qf ? std::hypot(pf->obs.u - qf->obs.u, pf->obs.v - qf->obs.v) : 0.0});
  }
  std::sort(order.begin(), order.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  });

  const auto less = [&](const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return tracklets[a.index].id < tracklets[b.index].id;
  };
  std::vector<Neighbor> best;  // sorted by `less`, at most k
  for (const Neighbor& c : order) {
    if (static_cast<int>(best.size()) == k && c.distance > best.back().distance) break;
    const double d = tracklet_distance(p, tracklets[c.index]);
    if (!std::isfinite(d)) continue;
    const Neighbor n{c.index, d};
    if (static_cast<int>(best.size()) == k && !less(n, best.back())) continue;
    best.insert(std::upper_bound(best.begin(), best.end(), n, less), n);
    if (static_cast<int>(best.size()) > k) best.pop_back();
  }
  return best;
}

double residual_entry(const StereoIntrinsics& K, const Tracklet& t, const StepChain& chain) {
  const auto e = max_transfer_error(K, t, chain);
  return e ? *e : kInfinity;
}

int count_inliers(const StereoIntrinsics& K, const FramePairData& data, const Pose& h, double threshold) {
  int n = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (transfer_error(K, h, data.previous_points[i], data.current_obs[i]) < threshold) ++n;
  }
  return n;
}

}  // namespace

std::vector<std::vector<Neighbor>> nearest_neighbors_serial(std::span<const Tracklet> tracklets, int k) {
  std::vector<std::vector<Neighbor>> out(tracklets.size());
  for (int i = 0; i < static_cast<int>(tracklets.size()); ++i) out[i] = nearest_of(tracklets, i, k);
  return out;
}

std::vector<std::vector<Neighbor>> nearest_neighbors_parallel(std::span<const Tracklet> tracklets, int k) {
  std::vector<std::vector<Neighbor>> out(tracklets.size());
  const int n = static_cast<int>(tracklets.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < n; ++i) out[i] = nearest_of(tracklets, i, k);
  return out;
}

std::vector<double> residual_matrix_serial(const StereoIntrinsics& K, std::span<const Tracklet> tracklets,
                                           std::span<const StepChain> chains) {
  const std::size_t cols = chains.size();
  std::vector<double> out(tracklets.size() * cols);
  for (std::size_t i = 0; i < tracklets.size(); ++i) {
    for (std::size_t c = 0; c < cols; ++c) out[i * cols + c] = residual_entry(K, tracklets[i], chains[c]);
  }
  return out;
}

std::vector<double> residual_matrix_parallel(const StereoIntrinsics& K, std::span<const Tracklet> tracklets,
                                             std::span<const StepChain> chains) {
  const std::size_t cols = chains.size();
  const long rows = static_cast<long>(tracklets.size());
  std::vector<double> out(tracklets.size() * cols);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < cols; ++c) out[i * cols + c] = residual_entry(K, tracklets[i], chains[c]);
  }
  return out;
}

std::vector<int> score_hypotheses_serial(const StereoIntrinsics& K, const FramePairData& data,
                                         std::span<const Pose> hypotheses, double threshold) {
  std::vector<int> out(hypotheses.size());
  for (std::size_t h = 0; h < hypotheses.size(); ++h) out[h] = count_inliers(K, data, hypotheses[h], threshold);
  return out;
}

std::vector<int> score_hypotheses_parallel(const StereoIntrinsics& K, const FramePairData& data,
                                           std::span<const Pose> hypotheses, double threshold) {
  std::vector<int> out(hypotheses.size());
  const long n = static_cast<long>(hypotheses.size());
#pragma omp parallel for schedule(static)
  for (long h = 0; h < n; ++h) out[h] = count_inliers(K, data, hypotheses[h], threshold);
  return out;
}

}  // namespace mvo::kernels
