#pragma once

#include "mvo/stereo_camera.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace mvo {

using TrackletId = std::int64_t;

struct TrackletFrame {
  StereoObservation obs;
  Vec3 point = Vec3::Zero();  // backproject(obs), camera frame of that image
};

/// One feature's stereo observations over consecutive frames starting at
/// first_frame. Entries may be empty (gaps); the first and last are not.
struct Tracklet {
  TrackletId id = 0;
  int first_frame = 0;
  std::vector<std::optional<TrackletFrame>> frames;

  int last_frame() const { return first_frame + static_cast<int>(frames.size()) - 1; }

  const TrackletFrame* at(int frame) const {
    const int i = frame - first_frame;
    if (i < 0 || i >= static_cast<int>(frames.size()) || !frames[i]) return nullptr;
    return &*frames[i];
  }
  bool observed(int frame) const { return at(frame) != nullptr; }
  bool observed_pair(int frame) const { return observed(frame - 1) && observed(frame); }

  int observation_count() const;
  /// True if some pair of consecutive frames is observed.
  bool has_consecutive_pair() const;
};

/// Builds a tracklet from raw observations, filling in back-projections.
/// Observations with disparity <= min_disparity become gaps. Leading and
/// trailing gaps are trimmed. Returns nullopt if nothing remains.
std::optional<Tracklet> make_tracklet(const StereoIntrinsics& K, TrackletId id, int first_frame,
                                      const std::vector<std::optional<StereoObservation>>& obs);

/// Tracklets restricted to [start, start + length), re-indexed so the window
/// starts at frame 0. Keeps only tracklets with a consecutive observed pair
/// inside the window.
std::vector<Tracklet> extract_window(const std::vector<Tracklet>& all, int start, int length);

/// Number of frames spanned by the sequence (max last_frame + 1).
int sequence_length(const std::vector<Tracklet>& all);

/// JSON lines: {"id":..,"first_frame":..,"obs":[[u,v,d] | null, ...]}
void write_tracklets_jsonl(std::ostream& out, const std::vector<Tracklet>& tracklets);
std::vector<Tracklet> read_tracklets_jsonl(std::istream& in, const StereoIntrinsics& K);

}  // namespace mvo
