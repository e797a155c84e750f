#pragma once

#include "mvo/se3.hpp"

#include <span>

namespace mvo {

/// Least-squares rigid transform T minimising sum |dst_i - T src_i|^2
/// (Kabsch/Umeyama without scale). Requires >= 3 points.
Pose align_point_sets(std::span<const Vec3> src, std::span<const Vec3> dst);

}  // namespace mvo
