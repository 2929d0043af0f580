#pragma once

#include "pik/priority_qr.hpp"
#include "pik/system.hpp"

namespace pik {

/// r'(t,q) = r(t,q) - f_t(t,q).
Vec residual_reference(double t, const Vec& q, const KinematicSystem& S);

/// The block gain matrix L of the solver u = R^{-1} J_hat^T C_D^T L r'.
///   alpha = 1: D (I + C_L C_D~)^{-1}  (unit block-lower-triangular solve)
///   alpha = 2: H = blkdiag((J_a J_a^T + lambda_a^2 I)^+)
///   alpha = 3: D = blkdiag((C_aa C_aa^T + lambda_a^2 I)^+)
///   alpha = 4: I_m
/// lambda_a^2 comes from damping_value on M_a = C_aa C_aa^T; the infinite
/// state zeroes the block. C_D~ here is diag(C_aa^T D_a).
Mat solver_gain_matrix(const PriorityDecomposition& decomp, const Mat& J,
                       const SolverConfig& config);

struct VelocityResult {
  Vec u;
  SingularityReport report;
  PriorityDecomposition decomp;
  // Evaluation context, kept for diagnostics:
  Mat J;
  Mat R;
  Mat L;
  Vec r_prime;
};

/// One solver evaluation at (t, q): u = R^{-1} J_hat^T C_D^T L r'.
/// Non-invertible R is a domain error; NaN from an evaluator is a data error.
VelocityResult pik_velocity(double t, const Vec& q, const KinematicSystem& S,
                            const SolverConfig& config);

/// Per-task residuals e_a^res = r'_a - J_a R u at (t, q).
std::vector<Vec> task_residuals(double t, const Vec& q, const Vec& u, const KinematicSystem& S,
                                const SolverConfig& config);

/// Upper bound on ||u|| assembled from the norm-bound pair of each C_aa and
/// the 1/lambda_a^2 block bounds: ||u|| <= ||R^{-1}|| * ||C_D|| * B_L * ||r'||
/// with B_L the family-specific bound on ||L|| (finite Neumann sum for
/// alpha = 1, exact since C_L C_D~ is nilpotent). Infinite when it cannot be
/// bounded (some mu_a = 0 at a rank-deficient block).
double velocity_norm_bound(const PriorityDecomposition& decomp, const SolverConfig& config,
                           double R_inv_norm, double r_prime_norm);

}  // namespace pik
