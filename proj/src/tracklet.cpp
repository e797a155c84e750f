#include "mvo/tracklet.hpp"

#include "mvo/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

namespace mvo {

int Tracklet::observation_count() const {
  return static_cast<int>(std::count_if(frames.begin(), frames.end(), [](const auto& f) { return f.has_value(); }));
}

bool Tracklet::has_consecutive_pair() const {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i - 1] && frames[i]) return true;
  }
  return false;
}

std::optional<Tracklet> make_tracklet(const StereoIntrinsics& K, TrackletId id, int first_frame,
                                      const std::vector<std::optional<StereoObservation>>& obs) {
  std::vector<std::optional<TrackletFrame>> frames(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (!obs[i] || obs[i]->d <= K.min_disparity) continue;
    frames[i] = TrackletFrame{*obs[i], backproject(K, *obs[i])};
  }
  auto first = std::find_if(frames.begin(), frames.end(), [](const auto& f) { return f.has_value(); });
  if (first == frames.end()) return std::nullopt;
  auto last = std::find_if(frames.rbegin(), frames.rend(), [](const auto& f) { return f.has_value(); }).base();
  Tracklet t;
  t.id = id;
  t.first_frame = first_frame + static_cast<int>(first - frames.begin());
  t.frames.assign(first, last);
  return t;
}

std::vector<Tracklet> extract_window(const std::vector<Tracklet>& all, int start, int length) {
  std::vector<Tracklet> out;
  const int end = start + length;
  for (const Tracklet& t : all) {
    const int lo = std::max(start, t.first_frame);
    const int hi = std::min(end - 1, t.last_frame());
    if (lo > hi) continue;
    Tracklet w;
    w.id = t.id;
    w.first_frame = lo;
    w.frames.assign(t.frames.begin() + (lo - t.first_frame), t.frames.begin() + (hi - t.first_frame + 1));
    while (!w.frames.empty() && !w.frames.front()) {
      w.frames.erase(w.frames.begin());
      ++w.first_frame;
    }
    while (!w.frames.empty() && !w.frames.back()) w.frames.pop_back();
    if (!w.has_consecutive_pair()) continue;
    w.first_frame -= start;
    out.push_back(std::move(w));
  }
  return out;
}

int sequence_length(const std::vector<Tracklet>& all) {
  int n = 0;
  for (const Tracklet& t : all) n = std::max(n, t.last_frame() + 1);
  return n;
}

void write_tracklets_jsonl(std::ostream& out, const std::vector<Tracklet>& tracklets) {
  for (const Tracklet& t : tracklets) {
    nlohmann::json obs = nlohmann::json::array();
    for (const auto& f : t.frames) {
      if (f) {
        obs.push_back({f->obs.u, f->obs.v, f->obs.d});
      } else {
        obs.push_back(nullptr);
      }
    }
    nlohmann::json line = {{"id", t.id}, {"first_frame", t.first_frame}, {"obs", std::move(obs)}};
    out << line.dump() << '\n';
  }
}

std::vector<Tracklet> read_tracklets_jsonl(std::istream& in, const StereoIntrinsics& K) {
  std::vector<Tracklet> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      std::vector<std::optional<StereoObservation>> obs;
      for (const auto& o : j.at("obs")) {
        if (o.is_null()) {
          obs.emplace_back();
        } else {
          obs.push_back(StereoObservation{o.at(0).get<double>(), o.at(1).get<double>(), o.at(2).get<double>()});
        }
      }
      auto t = make_tracklet(K, j.at("id").get<TrackletId>(), j.at("first_frame").get<int>(), obs);
      if (t) out.push_back(std::move(*t));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, "tracklets line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace mvo
