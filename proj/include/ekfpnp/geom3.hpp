#pragma once

#include <Eigen/Dense>

namespace ekfpnp {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat43 = Eigen::Matrix<double, 4, 3>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Rotation angles below this are evaluated with a Taylor branch to keep the
// exponential map and its Jacobian finite at zero.
inline constexpr double kSmallAngle = 1e-8;

// Quaternion in scalar-first Hamilton convention [w, x, y, z].
// Products are never auto-normalized; normalization is an explicit step so
// Jacobians can be taken of the raw product.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Quaternion() = default;
  Quaternion(double w_, double x_, double y_, double z_)
      : w(w_), x(x_), y(y_), z(z_) {}

  static Quaternion identity() { return {}; }

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  Quaternion normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
  }

  Vec4 coeffs() const { return {w, x, y, z}; }

  static Quaternion from_coeffs(const Vec4& c) {
    return {c[0], c[1], c[2], c[3]};
  }
};

Quaternion quat_mul(const Quaternion& a, const Quaternion& b);
Quaternion quat_conj(const Quaternion& q);

// Axis-angle exponential: q = [cos(|t|/2), sin(|t|/2) t/|t|].
Quaternion quat_from_rotvec(const Vec3& rotvec);

// Sandwich product q [0; v] q*. Equals quat_to_rotmat(q) * v for unit q.
Vec3 quat_rotate(const Quaternion& q, const Vec3& v);

// Homogeneous rotation-matrix form; orthonormal with det +1 for unit q.
Mat3 quat_to_rotmat(const Quaternion& q);
Quaternion quat_from_rotmat(const Mat3& R);

// Rotation vector t with quat_mul(a, quat_from_rotvec(t)) = b up to sign,
// principal value |t| <= pi. The sign ambiguity of the double cover is
// resolved toward the representative of b with non-negative dot against a.
Vec3 rotvec_between(const Quaternion& a, const Quaternion& b);

// Jacobian of quat_mul(a, rhs) with respect to a, ordering [w, x, y, z].
Mat4 quat_mul_jac_left(const Quaternion& rhs);
// Jacobian of quat_mul(lhs, b) with respect to b.
Mat4 quat_mul_jac_right(const Quaternion& lhs);
// Jacobian of quat_from_rotvec, 4x3, same Taylor branch as the map itself.
Mat43 quat_from_rotvec_jac(const Vec3& rotvec);

}  // namespace ekfpnp
