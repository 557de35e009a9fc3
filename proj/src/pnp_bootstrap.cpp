#include "ekfpnp/pnp_bootstrap.hpp"

#include <cmath>
#include <limits>

namespace ekfpnp {

namespace {

Mat3 skew(const Vec3& v) {
  Mat3 S;
  S << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return S;
}

// Residual RMS in pixels; +inf when any point fails cheirality.
double reprojection_rms(const Pose& pose, const PnPProblem& prob) {
  double sum = 0.0;
  for (size_t i = 0; i < prob.points.size(); ++i) {
    const Vec3 xc = world_to_camera(pose, prob.points[i]);
    if (!(xc.z() > kCheiralityEps))
      return std::numeric_limits<double>::infinity();
    const Vec2 px = project(prob.intr, xc);
    sum += (px - Vec2(prob.obs[2 * i], prob.obs[2 * i + 1])).squaredNorm();
  }
  return std::sqrt(sum / double(2 * prob.points.size()));
}

}  // namespace

Pose solve_dlt(const PnPProblem& prob) {
  const size_t n = prob.points.size();
  if (n < 6) throw std::invalid_argument("solve_dlt needs at least 6 points");
  if (prob.obs.size() != Eigen::Index(2 * n))
    throw std::invalid_argument("observation length does not match points");

  // 1. Normalize pixels by the intrinsics.
  std::vector<Vec2> m(n);
  for (size_t i = 0; i < n; ++i) {
    m[i] = {(prob.obs[2 * i] - prob.intr.cx) / prob.intr.f,
            (prob.obs[2 * i + 1] - prob.intr.cy) / prob.intr.f};
  }

  // 2. Hartley normalization of both point sets.
  Vec2 mc = Vec2::Zero();
  Vec3 xc = Vec3::Zero();
  for (size_t i = 0; i < n; ++i) {
    mc += m[i];
    xc += prob.points[i];
  }
  mc /= double(n);
  xc /= double(n);
  double md = 0.0, xd = 0.0;
  for (size_t i = 0; i < n; ++i) {
    md += (m[i] - mc).norm();
    xd += (prob.points[i] - xc).norm();
  }
  md /= double(n);
  xd /= double(n);
  const double s2 = (md > 0.0) ? std::sqrt(2.0) / md : 1.0;
  const double s3 = (xd > 0.0) ? std::sqrt(3.0) / xd : 1.0;

  Mat3 T2 = Mat3::Identity();
  T2(0, 0) = T2(1, 1) = s2;
  T2.block<2, 1>(0, 2) = -s2 * mc;
  Mat4 T3 = Mat4::Identity();
  T3.block<3, 3>(0, 0) = s3 * Mat3::Identity();
  T3.block<3, 1>(0, 3) = -s3 * xc;

  // 3. Stack the 2n x 12 homogeneous system over the normalized data.
  MatX A = MatX::Zero(2 * n, 12);
  for (size_t i = 0; i < n; ++i) {
    const Vec2 mi = s2 * (m[i] - mc);
    const Vec3 xi = s3 * (prob.points[i] - xc);
    const Vec4 X(xi.x(), xi.y(), xi.z(), 1.0);
    A.block<1, 4>(2 * i, 0) = X.transpose();
    A.block<1, 4>(2 * i, 8) = -mi.x() * X.transpose();
    A.block<1, 4>(2 * i + 1, 4) = X.transpose();
    A.block<1, 4>(2 * i + 1, 8) = -mi.y() * X.transpose();
  }

  Eigen::JacobiSVD<MatX> svd(A, Eigen::ComputeThinV);
  const VecX& sv = svd.singularValues();
  if (!(sv[10] > 1e-10 * sv[0]))
    throw DegenerateConfiguration(
        "rank-deficient resectioning system (coplanar or collinear points)");

  const VecX p = svd.matrixV().col(11);
  Eigen::Matrix<double, 3, 4> Pn;
  Pn.row(0) = p.segment<4>(0).transpose();
  Pn.row(1) = p.segment<4>(4).transpose();
  Pn.row(2) = p.segment<4>(8).transpose();

  // 4. Undo the normalization and fix the projective sign so depths are
  // positive.
  Eigen::Matrix<double, 3, 4> P = T2.inverse() * Pn * T3;
  double depth_sum = 0.0;
  for (size_t i = 0; i < n; ++i)
    depth_sum += P.row(2).dot(Vec4(prob.points[i].x(), prob.points[i].y(),
                                   prob.points[i].z(), 1.0));
  if (depth_sum < 0.0) P = -P;

  // 5. Procrustes projection of the leading block onto SO(3).
  Eigen::JacobiSVD<Mat3> rsvd(P.leftCols<3>(),
                              Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double d =
      (rsvd.matrixU() * rsvd.matrixV().transpose()).determinant() < 0.0 ? -1.0
                                                                        : 1.0;
  const Mat3 R = rsvd.matrixU() * Vec3(1.0, 1.0, d).asDiagonal() *
                 rsvd.matrixV().transpose();
  const Vec3& sing = rsvd.singularValues();
  const double scale = (sing[0] + sing[1] + d * sing[2]) / 3.0;
  if (!(scale > 0.0))
    throw DegenerateConfiguration("non-positive projection scale");

  const Vec3 t = P.col(3) / scale;
  return {quat_from_rotmat(R), -R.transpose() * t};
}

RefineResult refine_gn(const Pose& init, const PnPProblem& prob,
                       const GNConfig& cfg) {
  const size_t n = prob.points.size();
  if (n < 4) throw std::invalid_argument("refine_gn needs at least 4 points");
  if (prob.obs.size() != Eigen::Index(2 * n))
    throw std::invalid_argument("observation length does not match points");

  RefineResult res;
  res.pose = init;
  res.initial_rms = reprojection_rms(init, prob);
  if (std::isinf(res.initial_rms))
    throw CheiralityViolation();
  res.final_rms = res.initial_rms;
  res.residual_history.push_back(res.initial_rms);

  const Mat3 R_world = Mat3::Identity();  // keeps J layout explicit below
  (void)R_world;

  double rms = res.initial_rms;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    if (rms <= cfg.residual_tol) break;
    res.iterations = iter + 1;

    const Mat3 R = quat_to_rotmat(res.pose.q);
    MatX J(2 * n, 6);
    VecX r(2 * n);
    for (size_t i = 0; i < n; ++i) {
      const Vec3 d = prob.points[i] - res.pose.c;
      const Vec3 xc = R * d;
      const double iz = 1.0 / xc.z();
      Eigen::Matrix<double, 2, 3> duv_dxc;
      duv_dxc << prob.intr.f * iz, 0.0, -prob.intr.f * xc.x() * iz * iz,  //
          0.0, prob.intr.f * iz, -prob.intr.f * xc.y() * iz * iz;
      const Vec2 px(prob.intr.f * xc.x() * iz + prob.intr.cx,
                    prob.intr.f * xc.y() * iz + prob.intr.cy);
      r.segment<2>(2 * i) =
          Vec2(prob.obs[2 * i], prob.obs[2 * i + 1]) - px;
      // r = z - pi; step minimizes |r - Jpi * delta| with
      // dpi/dc = -duv*R, dpi/dtheta = -duv*R*[d]_x, so J below is -dpi.
      J.block<2, 3>(2 * i, 0) = duv_dxc * R;
      J.block<2, 3>(2 * i, 3) = duv_dxc * R * skew(d);
    }

    Eigen::Matrix<double, 6, 6> JtJ = J.transpose() * J;
    Eigen::Matrix<double, 6, 1> Jtr = J.transpose() * r;
    Eigen::Matrix<double, 6, 1> delta = JtJ.ldlt().solve(Jtr);
    if (!delta.allFinite()) {
      res.converged = false;
      break;
    }

    // Candidate means c <- c - dc, q <- q * exp(-dtheta): the linearization
    // above absorbed the sign into J.
    bool accepted = false;
    double applied_step = 0.0;
    for (int halving = 0; halving <= 10; ++halving) {
      Pose cand;
      cand.c = res.pose.c - delta.head<3>();
      cand.q =
          quat_mul(res.pose.q, quat_from_rotvec(-delta.tail<3>())).normalized();
      const double cand_rms = reprojection_rms(cand, prob);
      if (cand_rms <= rms) {
        applied_step = delta.norm();
        res.pose = cand;
        rms = cand_rms;
        accepted = true;
        break;
      }
      delta *= 0.5;
    }
    if (!accepted) break;  // keep the argmin visited

    res.final_rms = rms;
    res.residual_history.push_back(rms);
    if (applied_step <= cfg.step_tol) break;
    if (iter + 1 == cfg.max_iters && applied_step > cfg.step_tol)
      res.converged = false;
  }
  res.final_rms = rms;
  return res;
}

Pose solve(const PnPProblem& prob, const GNConfig& cfg) {
  return refine_gn(solve_dlt(prob), prob, cfg).pose;
}

}  // namespace ekfpnp
