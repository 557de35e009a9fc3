#pragma once

#include <vector>

#include "ekfpnp/camera.hpp"

namespace ekfpnp {

using Vec13 = Eigen::Matrix<double, 13, 1>;
using Mat13 = Eigen::Matrix<double, 13, 13>;
using Mat13x6 = Eigen::Matrix<double, 13, 6>;

// Filter state over [c(0:3), q(3:7) scalar-first, v(7:10), w(10:13)]:
// camera center [m], orientation, linear velocity [m/frame] and angular
// velocity [rad/frame], with a full 13x13 covariance.
struct FilterState {
  Vec13 s = (Vec13() << 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0).finished();
  Mat13 P = Mat13::Zero();

  Vec3 center() const { return s.segment<3>(0); }
  Quaternion orientation() const { return {s[3], s[4], s[5], s[6]}; }
  Vec3 velocity() const { return s.segment<3>(7); }
  Vec3 angular_velocity() const { return s.segment<3>(10); }
};

// Stds of the random linear/angular accelerations driving the
// constant-velocity model, per frame^2. Expands to the diagonal covariance of
// the velocity noise [a dt, alpha dt].
struct ProcessNoise {
  double sigma_a = 0.05;
  double sigma_alpha = 0.05;
};

// Common pixel noise std; expands to sigma_px^2 * I over all observations.
struct MeasurementNoise {
  double sigma_px = 1.0;
};

// Diagonal initial covariance (variances per block).
struct InitialUncertainty {
  double pos_var = 1e-4;
  double quat_var = 1e-4;
  double vel_var = 1e-2;
  double ang_vel_var = 1e-2;
};

// Seeds the state from two consecutive poses: p1 becomes the pose, velocities
// come from one-sample finite differences.
FilterState init_from_two_poses(const Pose& p0, const Pose& p1, double dt,
                                const InitialUncertainty& prior);

// Jacobians of the constant-velocity transition with respect to the state (F)
// and the velocity noise [nu, Omega] (G), evaluated at zero noise.
Mat13 transition_jacobian_state(const FilterState& st, double dt);
Mat13x6 transition_jacobian_noise(const FilterState& st, double dt);

// Constant-velocity prediction: advances the mean, propagates the covariance
// through F P F^T + G Q G^T, renormalizes q and symmetrizes P.
FilterState predict(const FilterState& st, const ProcessNoise& pn, double dt);

struct CorrectResult {
  FilterState state;
  VecX innovation;      // z - h(prior) over the points used in the update
  MatX innovation_cov;  // H P H^T + U over the same points
  std::vector<int> excluded;  // cheirality-failed point indices
  bool updated = true;        // false when fewer than 3 points survive
};

// Measurement update against the stacked reprojections. Points failing
// cheirality under the prior mean are excluded and the update runs on the
// survivors; with fewer than 3 survivors the update is skipped and flagged.
// Throws SingularInnovation when the innovation solve fails.
CorrectResult correct(const FilterState& st, const ObservationVec& z,
                      const PointSet& pts, const Intrinsics& intr,
                      const MeasurementNoise& mn);

Pose state_pose(const FilterState& st);

}  // namespace ekfpnp
