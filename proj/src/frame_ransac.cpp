#include "mvo/frame_ransac.hpp"

#include "mvo/rigid_alignment.hpp"
#include "mvo/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace mvo {

namespace {

constexpr int kDegenerateRetries = 10;
constexpr int kRefinePasses = 3;
constexpr int kBatch = 64;
constexpr double kConfidence = 0.9999;

// Samples needed to draw at least one all-inlier triple with probability
// kConfidence at inlier ratio w.
int required_hypotheses(double w) {
  const double p3 = w * w * w;
  if (p3 >= 1.0) return 1;
  if (p3 <= 0.0) return std::numeric_limits<int>::max();
  const double n = std::log(1.0 - kConfidence) / std::log(1.0 - p3);
  return n >= std::numeric_limits<int>::max() ? std::numeric_limits<int>::max() : static_cast<int>(std::ceil(n));
}

std::vector<int> inlier_indices(const StereoIntrinsics& K, const kernels::FramePairData& data, const Pose& h,
                                double threshold) {
  std::vector<int> out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (kernels::transfer_error(K, h, data.previous_points[i], data.current_obs[i]) < threshold) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

Pose fit(const kernels::FramePairData& data, std::span<const int> idx) {
  std::vector<Vec3> src, dst;
  src.reserve(idx.size());
  dst.reserve(idx.size());
  for (int i : idx) {
    src.push_back(data.previous_points[i]);
    dst.push_back(data.current_points[i]);
  }
  return align_point_sets(src, dst);
}

}  // namespace

bool degenerate_triple(const Vec3& a, const Vec3& b, const Vec3& c) {
  constexpr double kMin = 1e-3;
  const double ab = (b - a).norm(), bc = (c - b).norm(), ca = (a - c).norm();
  const double longest = std::max({ab, bc, ca});
  if (std::min({ab, bc, ca}) < kMin) return true;
  // altitude onto the longest side is the smallest one
  const double twice_area = (b - a).cross(c - a).norm();
  return twice_area / longest < kMin;
}

std::optional<FrameTransformEstimate> ransac_frame_pair(const StereoIntrinsics& K,
                                                        const kernels::FramePairData& data, int iterations,
                                                        double threshold, std::uint64_t key) {
  const int n = static_cast<int>(data.size());
  if (n < 3) return std::nullopt;

  // Hypotheses are drawn in fixed-size batches; hypothesis h always uses the
  // same key, so the outcome does not depend on the thread count. Drawing
  // stops early once the best inlier ratio makes a better all-inlier sample
  // unlikely to have been missed.
  std::vector<Pose> hypotheses(iterations);
  std::vector<char> valid(iterations, 0);
  std::vector<int> scores(iterations, 0);
  int best = -1;
  for (int begin = 0; begin < iterations; begin += kBatch) {
    const int end = std::min(iterations, begin + kBatch);
#pragma omp parallel for schedule(static)
    for (int h = begin; h < end; ++h) {
      for (int attempt = 0; attempt < kDegenerateRetries; ++attempt) {
        CounterRng rng(hash_key({key, static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(attempt)}));
        std::uniform_int_distribution<int> pick(0, n - 1);
        std::array<int, 3> s{pick(rng), 0, 0};
        do { s[1] = pick(rng); } while (s[1] == s[0]);
        do { s[2] = pick(rng); } while (s[2] == s[0] || s[2] == s[1]);
        if (degenerate_triple(data.previous_points[s[0]], data.previous_points[s[1]], data.previous_points[s[2]]) ||
            degenerate_triple(data.current_points[s[0]], data.current_points[s[1]], data.current_points[s[2]])) {
          continue;
        }
        hypotheses[h] = fit(data, s);
        valid[h] = 1;
        break;
      }
    }
    const std::span<const Pose> batch(hypotheses.data() + begin, end - begin);
    const std::vector<int> batch_scores = kernels::score_hypotheses_parallel(K, data, batch, threshold);
    for (int h = begin; h < end; ++h) {
      scores[h] = batch_scores[h - begin];
      if (valid[h] && (best < 0 || scores[h] > scores[best])) best = h;
    }
    if (best >= 0 && end >= required_hypotheses(static_cast<double>(scores[best]) / n)) break;
  }
  if (best < 0) return std::nullopt;

  FrameTransformEstimate out{hypotheses[best], scores[best]};
  std::vector<int> support = inlier_indices(K, data, out.transform, threshold);
  for (int pass = 0; pass < kRefinePasses && support.size() >= 3; ++pass) {
    const Pose refined = fit(data, support);
    std::vector<int> refined_support = inlier_indices(K, data, refined, threshold);
    if (refined_support.size() < support.size()) break;
    out = {refined, static_cast<int>(refined_support.size())};
    if (refined_support == support) break;
    support = std::move(refined_support);
  }
  return out;
}

std::optional<MotionEstimate> estimate_motion(const Window& w, std::span<const int> subset,
                                              const EnergyParams& params, std::uint64_t key) {
  const int frames = w.frames;
  std::vector<std::optional<Pose>> steps(frames);
  for (int k = 1; k < frames; ++k) {
    kernels::FramePairData data;
    for (int i : subset) {
      const Tracklet& t = w.tracklets[i];
      const TrackletFrame* prev = t.at(k - 1);
      const TrackletFrame* cur = t.at(k);
      if (!prev || !cur) continue;
      data.previous_points.push_back(prev->point);
      data.current_points.push_back(cur->point);
      data.current_obs.push_back(cur->obs);
    }
    const auto est = ransac_frame_pair(w.intrinsics, data, params.ransac_iterations, params.inlier_threshold,
                                       hash_key({key, static_cast<std::uint64_t>(k)}));
    if (est) steps[k] = est->transform;
  }

  // longest run of consecutive steps; earliest wins ties
  int best_start = -1, best_len = 0;
  for (int k = 1; k < frames;) {
    if (!steps[k]) {
      ++k;
      continue;
    }
    int end = k;
    while (end + 1 < frames && steps[end + 1]) ++end;
    if (end - k + 1 > best_len) {
      best_len = end - k + 1;
      best_start = k;
    }
    k = end + 1;
  }
  if (best_start < 0) return std::nullopt;

  MotionEstimate m;
  m.label.poses.assign(frames, std::nullopt);
  m.label.poses[best_start - 1] = Pose::identity();
  for (int k = best_start; k < best_start + best_len; ++k) m.label.poses[k] = *steps[k] * *m.label.poses[k - 1];
  m.label.source = hash_subset(w, subset);

  const kernels::StepChain chain = m.label.steps();
  for (int i : subset) {
    const auto r = kernels::max_transfer_error(w.intrinsics, w.tracklets[i], chain);
    if (r && *r < params.inlier_threshold) {
      m.inliers.push_back(i);
    } else {
      m.outliers.push_back(i);
    }
  }
  return m;
}

}  // namespace mvo
