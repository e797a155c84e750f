#include "mvo/rigid_alignment.hpp"

#include <Eigen/Geometry>

#include <stdexcept>

namespace mvo {

Pose align_point_sets(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size() || src.size() < 3) {
    throw std::invalid_argument("align_point_sets needs >= 3 matched points");
  }
  Eigen::Matrix3Xd a(3, src.size()), b(3, dst.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    a.col(i) = src[i];
    b.col(i) = dst[i];
  }
  return Pose::from_matrix(Eigen::umeyama(a, b, false));
}

}  // namespace mvo
