#pragma once

#include <functional>
#include <vector>

#include "pik/pinv.hpp"
#include "pik/types.hpp"

namespace pik {

/// Value of the task map derivative F = [f_t  F_q] at a state (t, q).
struct FValue {
  Vec f_t;  // m
  Mat F_q;  // m x n
};

/// Preconditioned kinematic system with l >= 2 prioritized tasks:
/// task dims m_1..m_l with m = sum m_a <= n, evaluators for F, R, r.
/// J = F_q R^{-1} and r' = r - f_t are derived at evaluation time.
struct KinematicSystem {
  std::vector<int> task_dims;
  int n = 0;
  std::function<FValue(double, const Vec&)> F_eval;
  std::function<Mat(double, const Vec&)> R_eval;  // must stay invertible
  std::function<Vec(double, const Vec&)> r_eval;

  int tasks() const { return static_cast<int>(task_dims.size()); }
  int m() const;
  void validate() const;  // l >= 2, dims positive, m <= n, evaluators set
};

/// Identity preconditioner evaluator.
std::function<Mat(double, const Vec&)> identity_R(int n);

/// Tracking task f(t,q) -> p(t): value and derivative Df = [f_t  F_q].
struct TrackingValue {
  Vec f;   // m
  Mat Df;  // m x (n+1), first column is f_t
};

struct TargetValue {
  Vec p;
  Vec p_dot;
};

/// Task-space tracking setup: reference r = Psi (p_dot + K (p - f)).
/// Reaching is the special case of constant p. Gains k_a > 0 per task,
/// activations psi_a in [0, 1] per task.
struct TrackingSystem {
  std::vector<int> task_dims;
  int n = 0;
  std::function<TrackingValue(double, const Vec&)> f_eval;
  std::function<TargetValue(double)> p_eval;
  std::vector<double> gains;
  std::function<Vec(double, const Vec&)> psi_eval;  // length l
  std::function<Mat(double, const Vec&)> R_eval;    // empty -> identity

  int tasks() const { return static_cast<int>(task_dims.size()); }
  int m() const;
  void validate() const;

  /// Stacked task error e = p - f at a state.
  Vec error(double t, const Vec& q) const;
};

/// View a tracking setup as a kinematic system (shared evaluators).
KinematicSystem as_kinematic(const TrackingSystem& ts);

/// Virtual-joint padding for m > n: appends m - n zero columns to F_q and
/// extends R by an identity block, so the padded system satisfies m <= n.
/// Never applied implicitly; callers strip the padded tail of u themselves.
KinematicSystem pad_virtual_joints(const std::vector<int>& task_dims, int n,
                                   std::function<FValue(double, const Vec&)> F_eval,
                                   std::function<Mat(double, const Vec&)> R_eval,
                                   std::function<Vec(double, const Vec&)> r_eval);

/// Solver family and numerical knobs. alpha = 4 ignores the damping spec;
/// families 1..3 need mu_a > 0 for bounded velocities near singularities.
struct SolverConfig {
  int alpha = 4;
  DampingSpec damping;
  double zero_tol = 0.0;  // 0 -> default in orthogonalize
  double rank_tol = 0.0;  // 0 -> default in pseudoinverse calls
  bool second_sweep = false;

  void validate(int tasks) const;
};

}  // namespace pik
