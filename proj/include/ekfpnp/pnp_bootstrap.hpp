#pragma once

#include <vector>

#include "ekfpnp/camera.hpp"

namespace ekfpnp {

struct PnPProblem {
  PointSet points;
  ObservationVec obs;
  Intrinsics intr;
};

struct GNConfig {
  int max_iters = 20;
  double step_tol = 1e-10;
  double residual_tol = 1e-12;  // on the RMS pixel residual
};

// DLT resectioning with known intrinsics: pixels are normalized by the
// intrinsics, both point sets are Hartley-normalized, and the pose comes from
// the smallest right singular vector of the 2n x 12 system with an orthogonal
// Procrustes projection of the rotation block. Needs >= 6 non-coplanar
// points; throws DegenerateConfiguration on a rank-deficient system.
Pose solve_dlt(const PnPProblem& prob);

struct RefineResult {
  Pose pose;
  int iterations = 0;
  double initial_rms = 0.0;
  double final_rms = 0.0;
  bool converged = true;
  std::vector<double> residual_history;  // RMS after each accepted step
};

// Gauss-Newton over [dc, dtheta] (rotation-vector perturbation composed onto
// q), with step halving so the residual sequence is non-increasing. Returns
// the best pose visited; converged is false when max_iters is hit with the
// step still above step_tol.
RefineResult refine_gn(const Pose& init, const PnPProblem& prob,
                       const GNConfig& cfg = {});

// DLT followed by Gauss-Newton refinement.
Pose solve(const PnPProblem& prob, const GNConfig& cfg = {});

}  // namespace ekfpnp
