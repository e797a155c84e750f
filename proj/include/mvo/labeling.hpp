#pragma once

#include "mvo/kernels.hpp"
#include "mvo/se3.hpp"
#include "mvo/stereo_camera.hpp"
#include "mvo/tracklet.hpp"
#include "mvo/tracklet_graph.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mvo {

using LabelId = int;
inline constexpr LabelId kOutlier = -1;

/// Tracklets of one sliding window, frames re-indexed to [0, frames).
struct Window {
  StereoIntrinsics intrinsics;
  int frames = 0;
  std::vector<Tracklet> tracklets;  // sorted by id
};

/// Builds a window from whole-sequence tracklets.
Window make_window(const StereoIntrinsics& K, const std::vector<Tracklet>& all, int start, int length);

/// Motion hypothesis: camera egomotion T_{C_k C_s} that would explain the
/// support if it were static, s being the first spanned frame. Spanned frames
/// form one contiguous run.
struct Label {
  LabelId id = 0;
  std::vector<std::optional<Pose>> poses;  // one slot per window frame
  std::uint64_t source = 0;                // hash of the tracklet set it was estimated from

  int first_frame() const;
  int last_frame() const;
  int span() const;
  bool spans(int frame) const { return frame >= 0 && frame < static_cast<int>(poses.size()) && poses[frame]; }
  /// T_{C_k C_{k-1}} where both frames are spanned.
  kernels::StepChain steps() const;
};

struct OutlierLabel {
  std::vector<TrackletId> support;
};

struct EnergyParams {
  double lambda = 1.0;              // smoothness weight
  double label_cost = 1000.0;       // per-label complexity cost
  double alpha = 100.0;             // outlier residual scale
  double beta = 2.0;                // outlier residual decay, pixels
  double inlier_threshold = 4.0;    // e_th, pixels
  int k_nn = 5;
  int ransac_iterations = 1000;     // hypotheses per frame pair
  int min_support_points = 10;
  int min_support_frames = 3;
  int max_outer_iterations = 10;

  /// Throws Error(ConfigInvalid).
  void validate() const;
};

/// Label set plus a total assignment over the window's tracklets.
struct Labeling {
  std::vector<Label> labels;        // ascending id
  std::vector<LabelId> assignment;  // per tracklet index; kOutlier for O
  LabelId next_id = 0;

  const Label* find(LabelId id) const;
  std::vector<int> support(LabelId id) const;
  OutlierLabel outlier(const Window& w) const;
  /// Removes labels with empty support.
  void prune_empty();
  /// Adds a label with a fresh id and returns the id.
  LabelId add(Label label);
};

/// Transfer error at frame k; empty when p is not observed at k-1 and k or
/// the label does not span both.
std::optional<double> frame_residual(const StereoIntrinsics& K, const Tracklet& p, const Label& label, int frame);

/// Max of frame_residual over frames; empty when nothing overlaps.
std::optional<double> label_residual(const StereoIntrinsics& K, const Tracklet& p, const Label& label);

/// alpha * exp(-min residual / beta); 0 if no label overlaps p.
double outlier_residual(const StereoIntrinsics& K, const Tracklet& p, std::span<const Label> labels, double alpha,
                        double beta);

struct EnergyTerms {
  double residual = 0.0;
  double smoothness = 0.0;
  double complexity = 0.0;
  double total() const { return residual + smoothness + complexity; }
};

/// Residual + lambda * smoothness + complexity. Tracklets on labels that do
/// not overlap them contribute +inf.
EnergyTerms total_energy(const Window& w, const Labeling& labeling, const NeighborhoodGraph& graph,
                         const EnergyParams& params);

/// Residuals of every tracklet against a label list (row-major, tracklets x
/// labels), with the derived outlier residual per tracklet.
struct ResidualTable {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;
  std::vector<double> outlier;

  double at(int tracklet, int label_index) const { return values[static_cast<std::size_t>(tracklet) * cols + label_index]; }
};

ResidualTable residual_table(const Window& w, std::span<const Label> labels, const EnergyParams& params);

/// Energy of `assignment` (label ids) against labels with a precomputed table.
EnergyTerms energy_from_table(const ResidualTable& table, std::span<const Label> labels,
                              std::span<const LabelId> assignment, const NeighborhoodGraph& graph,
                              const EnergyParams& params);

/// Order-independent hash of a tracklet-index set.
std::uint64_t hash_subset(const Window& w, std::span<const int> subset);

}  // namespace mvo
