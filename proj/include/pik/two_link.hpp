#pragma once

#include "pik/activation.hpp"
#include "pik/priority_qr.hpp"
#include "pik/spline.hpp"
#include "pik/system.hpp"

namespace pik {

struct TwoLinkParams {
  double L1 = 1.0;
  double L2 = 1.0;

  double reach() const { return L1 + L2; }
  double inner_radius() const { return std::abs(L1 - L2); }
  void validate() const;
};

struct FkResult {
  Vec f;  // (x, y)
  Mat J;  // 2 x 2
};

/// Planar two-link forward kinematics, time-invariant:
///   f = (L1 cos q1 + L2 cos(q1+q2), L1 sin q1 + L2 sin(q1+q2)).
FkResult two_link_fk(const TwoLinkParams& params, double t, const Vec& q);

/// Closed-form priority QR of the two-link Jacobian with x before y. Three
/// branches: both rows zero direction (q on the lattice), parallel rows
/// (q2 on the lattice only), and the generic case via the residual
/// j2 (I - j1^T j1 / j1 j1^T). Extends the chart formulas by periodicity.
PriorityDecomposition two_link_analytic_qr(const TwoLinkParams& params, double t, const Vec& q);

enum class LatticeClass { Y1, Y2 };  // Y1: q2 even multiple of pi; Y2: odd

struct HessianResult {
  Mat H;  // D_q (c11 j1_hat^T) at the lattice point = Hessian of f1
  LatticeClass cls;
};

/// The Hessian of the first task map at a singular lattice point q (both
/// coordinates multiples of pi, snapped within snap_tol), with its lattice
/// classification.
HessianResult two_link_hessian_at_singularity(const TwoLinkParams& params, const Vec& q,
                                              double snap_tol = 1e-9);

/// Distance from q to the nearest point of the lattice pi Z^2, and to Y1.
double lattice_distance(const Vec& q);
double y1_distance(const Vec& q);

/// Tracking system for the arm: tasks (x, y) with priority x over y.
TrackingSystem two_link_tracking(const TwoLinkParams& params,
                                 std::function<TargetValue(double)> target,
                                 std::vector<double> gains,
                                 std::function<Vec(double, const Vec&)> psi);

}  // namespace pik
