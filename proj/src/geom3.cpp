#include "ekfpnp/geom3.hpp"

#include <cmath>

namespace ekfpnp {

Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Quaternion quat_conj(const Quaternion& q) { return {q.w, -q.x, -q.y, -q.z}; }

namespace {

// sin(t/2)/t with a second-order Taylor branch below the small-angle cutoff.
double half_sinc(double t) {
  if (t < kSmallAngle) return 0.5 - t * t / 48.0;
  return std::sin(0.5 * t) / t;
}

}  // namespace

Quaternion quat_from_rotvec(const Vec3& rotvec) {
  const double t = rotvec.norm();
  const double s = half_sinc(t);
  const double w = (t < kSmallAngle) ? 1.0 - t * t / 8.0 : std::cos(0.5 * t);
  return {w, s * rotvec.x(), s * rotvec.y(), s * rotvec.z()};
}

Vec3 quat_rotate(const Quaternion& q, const Vec3& v) {
  const Quaternion p{0.0, v.x(), v.y(), v.z()};
  const Quaternion r = quat_mul(quat_mul(q, p), quat_conj(q));
  return {r.x, r.y, r.z};
}

Mat3 quat_to_rotmat(const Quaternion& q) {
  const double ww = q.w * q.w, xx = q.x * q.x, yy = q.y * q.y, zz = q.z * q.z;
  const double wx = q.w * q.x, wy = q.w * q.y, wz = q.w * q.z;
  const double xy = q.x * q.y, xz = q.x * q.z, yz = q.y * q.z;
  Mat3 R;
  R << ww + xx - yy - zz, 2.0 * (xy - wz), 2.0 * (xz + wy),  //
      2.0 * (xy + wz), ww - xx + yy - zz, 2.0 * (yz - wx),   //
      2.0 * (xz - wy), 2.0 * (yz + wx), ww - xx - yy + zz;
  return R;
}

Quaternion quat_from_rotmat(const Mat3& R) {
  // Shepperd's method: branch on the largest of the four squared components.
  const double tr = R.trace();
  Quaternion q;
  if (tr > R(0, 0) && tr > R(1, 1) && tr > R(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + tr);
    q = {0.25 * s, (R(2, 1) - R(1, 2)) / s, (R(0, 2) - R(2, 0)) / s,
         (R(1, 0) - R(0, 1)) / s};
  } else if (R(0, 0) > R(1, 1) && R(0, 0) > R(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2));
    q = {(R(2, 1) - R(1, 2)) / s, 0.25 * s, (R(0, 1) + R(1, 0)) / s,
         (R(0, 2) + R(2, 0)) / s};
  } else if (R(1, 1) > R(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 - R(0, 0) + R(1, 1) - R(2, 2));
    q = {(R(0, 2) - R(2, 0)) / s, (R(0, 1) + R(1, 0)) / s, 0.25 * s,
         (R(1, 2) + R(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 - R(0, 0) - R(1, 1) + R(2, 2));
    q = {(R(1, 0) - R(0, 1)) / s, (R(0, 2) + R(2, 0)) / s,
         (R(1, 2) + R(2, 1)) / s, 0.25 * s};
  }
  return q.normalized();
}

Vec3 rotvec_between(const Quaternion& a, const Quaternion& b) {
  Quaternion d = quat_mul(quat_conj(a), b);
  if (d.w < 0.0) d = {-d.w, -d.x, -d.y, -d.z};
  const Vec3 v{d.x, d.y, d.z};
  const double vn = v.norm();
  if (vn < kSmallAngle) return 2.0 / d.w * v;
  const double angle = 2.0 * std::atan2(vn, d.w);
  return (angle / vn) * v;
}

Mat4 quat_mul_jac_left(const Quaternion& b) {
  Mat4 J;
  J << b.w, -b.x, -b.y, -b.z,  //
      b.x, b.w, b.z, -b.y,     //
      b.y, -b.z, b.w, b.x,     //
      b.z, b.y, -b.x, b.w;
  return J;
}

Mat4 quat_mul_jac_right(const Quaternion& a) {
  Mat4 J;
  J << a.w, -a.x, -a.y, -a.z,  //
      a.x, a.w, -a.z, a.y,     //
      a.y, a.z, a.w, -a.x,     //
      a.z, -a.y, a.x, a.w;
  return J;
}

Mat43 quat_from_rotvec_jac(const Vec3& rotvec) {
  const double t = rotvec.norm();
  const double s = half_sinc(t);
  // k = d(half_sinc)/dt / t, finite at zero.
  double k;
  if (t < kSmallAngle) {
    k = -1.0 / 24.0;
  } else {
    k = (0.5 * t * std::cos(0.5 * t) - std::sin(0.5 * t)) / (t * t * t);
  }
  Mat43 J;
  J.row(0) = -0.5 * s * rotvec.transpose();
  J.bottomRows<3>() =
      s * Mat3::Identity() + k * (rotvec * rotvec.transpose());
  return J;
}

}  // namespace ekfpnp
