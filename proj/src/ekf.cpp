#include "ekfpnp/ekf.hpp"

#include <cmath>

namespace ekfpnp {

namespace {

void set_quat(Vec13& s, const Quaternion& q) {
  s[3] = q.w;
  s[4] = q.x;
  s[5] = q.y;
  s[6] = q.z;
}

void renormalize_quat(Vec13& s) {
  s.segment<4>(3).normalize();
}

void symmetrize(Mat13& P) { P = 0.5 * (P + P.transpose()).eval(); }

}  // namespace

FilterState init_from_two_poses(const Pose& p0, const Pose& p1, double dt,
                                const InitialUncertainty& prior) {
  FilterState st;
  st.s.segment<3>(0) = p1.c;
  set_quat(st.s, p1.q);
  st.s.segment<3>(7) = (p1.c - p0.c) / dt;
  st.s.segment<3>(10) = rotvec_between(p0.q, p1.q) / dt;

  st.P.setZero();
  st.P.block<3, 3>(0, 0) = prior.pos_var * Mat3::Identity();
  st.P.block<4, 4>(3, 3) = prior.quat_var * Mat4::Identity();
  st.P.block<3, 3>(7, 7) = prior.vel_var * Mat3::Identity();
  st.P.block<3, 3>(10, 10) = prior.ang_vel_var * Mat3::Identity();
  return st;
}

Mat13 transition_jacobian_state(const FilterState& st, double dt) {
  const Quaternion rot_step = quat_from_rotvec(st.angular_velocity() * dt);
  Mat13 F = Mat13::Identity();
  F.block<3, 3>(0, 7) = dt * Mat3::Identity();
  F.block<4, 4>(3, 3) = quat_mul_jac_left(rot_step);
  F.block<4, 3>(3, 10) = quat_mul_jac_right(st.orientation()) *
                         quat_from_rotvec_jac(st.angular_velocity() * dt) * dt;
  return F;
}

Mat13x6 transition_jacobian_noise(const FilterState& st, double dt) {
  Mat13x6 G = Mat13x6::Zero();
  G.block<3, 3>(0, 0) = dt * Mat3::Identity();
  // The noise velocity enters the rotation step the same way w does.
  G.block<4, 3>(3, 3) = quat_mul_jac_right(st.orientation()) *
                        quat_from_rotvec_jac(st.angular_velocity() * dt) * dt;
  G.block<3, 3>(7, 0) = Mat3::Identity();
  G.block<3, 3>(10, 3) = Mat3::Identity();
  return G;
}

FilterState predict(const FilterState& st, const ProcessNoise& pn, double dt) {
  const Mat13 F = transition_jacobian_state(st, dt);
  const Mat13x6 G = transition_jacobian_noise(st, dt);

  Eigen::Matrix<double, 6, 6> Q = Eigen::Matrix<double, 6, 6>::Zero();
  Q.topLeftCorner<3, 3>() =
      (pn.sigma_a * dt) * (pn.sigma_a * dt) * Mat3::Identity();
  Q.bottomRightCorner<3, 3>() =
      (pn.sigma_alpha * dt) * (pn.sigma_alpha * dt) * Mat3::Identity();

  FilterState out;
  out.s = st.s;
  out.s.segment<3>(0) += st.velocity() * dt;
  const Quaternion q_next =
      quat_mul(st.orientation(), quat_from_rotvec(st.angular_velocity() * dt));
  set_quat(out.s, q_next);
  renormalize_quat(out.s);

  out.P = F * st.P * F.transpose() + G * Q * G.transpose();
  symmetrize(out.P);
  return out;
}

CorrectResult correct(const FilterState& st, const ObservationVec& z,
                      const PointSet& pts, const Intrinsics& intr,
                      const MeasurementNoise& mn) {
  if (z.size() != Eigen::Index(2 * pts.size()))
    throw ConfigError("observation length does not match the point set");
  if (!(mn.sigma_px > 0.0))
    throw ConfigError("measurement noise sigma_px must be positive");

  const Pose pose = state_pose(st);

  // Partition into points passing cheirality under the prior mean.
  std::vector<int> used, excluded;
  used.reserve(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    const Vec3 xc = world_to_camera(pose, pts[i]);
    (xc.z() > kCheiralityEps ? used : excluded).push_back(int(i));
  }

  CorrectResult res;
  res.excluded = excluded;
  if (used.size() < 3) {
    res.state = st;
    res.updated = false;
    return res;
  }

  PointSet sub;
  sub.reserve(used.size());
  VecX z_sub(2 * used.size());
  for (size_t k = 0; k < used.size(); ++k) {
    sub.push_back(pts[used[k]]);
    z_sub.segment<2>(2 * k) = z.segment<2>(2 * used[k]);
  }

  const VecX h = observe(pose, intr, sub);
  const MatX H = jacobian_obs_state(pose, intr, sub);
  const VecX innovation = z_sub - h;

  MatX S = H * st.P * H.transpose();
  S.diagonal().array() += mn.sigma_px * mn.sigma_px;

  Eigen::LDLT<MatX> ldlt(S);
  if (ldlt.info() != Eigen::Success)
    throw SingularInnovation("innovation covariance factorization failed");

  // K = P H^T S^{-1}, via S X = H P.
  const MatX K = ldlt.solve(H * st.P).transpose();
  if (!K.allFinite())
    throw SingularInnovation(
        "innovation solve produced non-finite gain; sigma_px too small or "
        "degenerate geometry");

  res.state.s = st.s + K * innovation;
  renormalize_quat(res.state.s);
  res.state.P = st.P - K * (H * st.P);
  symmetrize(res.state.P);
  res.innovation = innovation;
  res.innovation_cov = std::move(S);
  return res;
}

Pose state_pose(const FilterState& st) {
  return {st.orientation(), st.center()};
}

}  // namespace ekfpnp
