#include "ekfpnp/camera.hpp"

namespace ekfpnp {

Vec3 world_to_camera(const Pose& pose, const Vec3& x) {
  return quat_rotate(pose.q, x - pose.c);
}

Vec2 project(const Intrinsics& intr, const Vec3& xc) {
  if (!(xc.z() > kCheiralityEps)) throw CheiralityViolation();
  return {intr.f * xc.x() / xc.z() + intr.cx,
          intr.f * xc.y() / xc.z() + intr.cy};
}

ObservationVec observe(const Pose& pose, const Intrinsics& intr,
                       const PointSet& pts) {
  ObservationVec z(2 * pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    const Vec3 xc = world_to_camera(pose, pts[i]);
    if (!(xc.z() > kCheiralityEps)) throw CheiralityViolation(int(i));
    const Vec2 px = project(intr, xc);
    z[2 * i] = px.x();
    z[2 * i + 1] = px.y();
  }
  return z;
}

MatX jacobian_obs_state(const Pose& pose, const Intrinsics& intr,
                        const PointSet& pts) {
  const size_t n = pts.size();
  MatX H = MatX::Zero(2 * n, 13);

  const Quaternion& q = pose.q;
  const Quaternion qc = quat_conj(q);
  // dxc/dc: the sandwich map is linear in (x - c).
  const Mat3 dxc_dc = -quat_to_rotmat(q);
  const Mat4 conj_sign = Vec4(1.0, -1.0, -1.0, -1.0).asDiagonal();

  for (size_t i = 0; i < n; ++i) {
    const Vec3 d = pts[i] - pose.c;
    const Vec3 xc = quat_rotate(q, d);
    if (!(xc.z() > kCheiralityEps)) throw CheiralityViolation(int(i));

    // Pinhole derivative wrt the camera-frame point.
    const double iz = 1.0 / xc.z();
    Eigen::Matrix<double, 2, 3> duv_dxc;
    duv_dxc << intr.f * iz, 0.0, -intr.f * xc.x() * iz * iz,  //
        0.0, intr.f * iz, -intr.f * xc.y() * iz * iz;

    // Sandwich p = (q * [0;d]) * q~ differentiated through both occurrences
    // of q; rows 1..3 of the 4x4 are the vector part.
    const Quaternion dq{0.0, d.x(), d.y(), d.z()};
    const Mat4 dp_dq = quat_mul_jac_left(qc) * quat_mul_jac_left(dq) +
                       quat_mul_jac_right(quat_mul(q, dq)) * conj_sign;
    const Eigen::Matrix<double, 3, 4> dxc_dq = dp_dq.bottomRows<3>();

    H.block<2, 3>(2 * i, 0) = duv_dxc * dxc_dc;
    H.block<2, 4>(2 * i, 3) = duv_dxc * dxc_dq;
  }
  return H;
}

}  // namespace ekfpnp
