#pragma once

#include <vector>

#include "ekfpnp/errors.hpp"
#include "ekfpnp/geom3.hpp"

namespace ekfpnp {

// Ideal pinhole camera, no distortion.
struct Intrinsics {
  double f = 800.0;  // focal length [px]
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;
};

// Camera pose: world-to-camera rotation q and camera center c in the world
// frame, so a world point maps to quat_rotate(q, x - c).
struct Pose {
  Quaternion q;
  Vec3 c = Vec3::Zero();
};

using PointSet = std::vector<Vec3>;

// Interleaved pixel observations [x1_i, x1_j, ..., xn_i, xn_j].
using ObservationVec = Eigen::VectorXd;

// Minimum camera-frame depth for a point to count as visible.
inline constexpr double kCheiralityEps = 1e-9;

Vec3 world_to_camera(const Pose& pose, const Vec3& x);

// Pinhole projection of a camera-frame point. Throws CheiralityViolation when
// the depth is at or below kCheiralityEps.
Vec2 project(const Intrinsics& intr, const Vec3& xc);

// Stacked projections of all points, in point order. Out-of-image pixels are
// legal values; visibility policy is the caller's business.
ObservationVec observe(const Pose& pose, const Intrinsics& intr,
                       const PointSet& pts);

// Jacobian of observe with respect to the 13-dim filter state
// [c(3), q(4), v(3), w(3)], taken at the raw (unnormalized) quaternion
// components. Velocity columns 7..12 are exactly zero.
MatX jacobian_obs_state(const Pose& pose, const Intrinsics& intr,
                        const PointSet& pts);

}  // namespace ekfpnp
