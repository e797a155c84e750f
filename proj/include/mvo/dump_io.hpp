#pragma once

#include "mvo/evaluation.hpp"
#include "mvo/pipeline.hpp"

#include <json.hpp>
#include <iosfwd>
#include <optional>
#include <vector>

namespace mvo {

nlohmann::json pose_to_json(const std::optional<Pose>& pose);
std::optional<Pose> pose_from_json(const nlohmann::json& j);

/// Labeling dump: per label {id, span, poses, geocentric, center, support,
/// batch}, plus the assignment as [tracklet id, label id] pairs (-1 for O).
nlohmann::json window_to_json(const WindowEstimate& w);
/// Throws Error(ParseError).
WindowEstimate window_from_json(const nlohmann::json& j);

/// frame,r00..r23,kind,label; one row per window frame per label. Gap frames
/// leave the twelve pose columns empty. Egocentric rows come from the
/// hypothesis inverse, geocentric rows from the converted trajectory.
void write_trajectory_csv(std::ostream& out, const WindowEstimate& w);

nlohmann::json report_to_json(const ErrorReport& r);

/// frame,ex,ey,ez,roll,pitch,yaw
void write_error_csv(std::ostream& out, const MotionReport& m);

}  // namespace mvo
