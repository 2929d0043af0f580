#pragma once

#include <string>

#include "pik/solver.hpp"

namespace pik {

struct IntegratorConfig {
  enum class Method { RK4, DP54 };
  Method method = Method::RK4;
  double step = 1e-3;
  double t_end = 1.0;
  double min_step = 1e-6;
  /// When enabled, the step is halved (down to min_step) while
  /// |det C| < 10 * guard_det_tol; entering the band is recorded as an event.
  bool singularity_guard = false;
  double guard_det_tol = 1e-4;
  /// Per-step error acceptance threshold for the adaptive pair.
  double tolerance = 1e-8;

  void validate() const;
};

/// Sampled trajectory of q' = u(t, q) with per-node diagnostics. phi, eta,
/// rho, gamma are the per-task scalars
///   phi_a = ||e_a||, eta_a = ||psi_a C_aa^T L_aa e_a||,
///   rho_a = k_a psi_a phi_a^{+2} <e_a, A_aa e_a>, gamma_a = phi_a^+ <e_a, b_a>
/// with phi^+ = 0 at phi = 0. For plain kinematic systems (no target) the
/// error-based diagnostics are recorded as zero.
struct TrajectoryRecord {
  std::vector<int> task_dims;
  int n = 0;

  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> velocities;
  std::vector<Vec> errors;     // stacked e = p - f, length m
  std::vector<Vec> residuals;  // stacked e^res = r' - J R u, length m

  std::vector<Vec> phi, eta, rho, gamma;              // length l each node
  std::vector<double> det_C;
  std::vector<Vec> diag_c;                            // length m
  std::vector<Vec> sigma_min_psiA, sigma_min_psiC;    // length l

  std::vector<Vec> int_phi, int_eta, int_eta_sq;      // running trapezoids
  std::vector<double> int_u_norm;

  std::vector<size_t> guard_events;
  bool completed = false;
  std::string termination;

  int tasks() const { return static_cast<int>(task_dims.size()); }
  size_t steps() const { return times.size(); }
  Vec task_segment(const Vec& stacked, int a) const;
};

TrajectoryRecord integrate(const TrackingSystem& ts, const SolverConfig& config,
                           const IntegratorConfig& icfg, double t0, const Vec& q0);
TrajectoryRecord integrate(const KinematicSystem& S, const SolverConfig& config,
                           const IntegratorConfig& icfg, double t0, const Vec& q0);

/// The matrices A_ab = sum_{i=b..a} C_ai C_ii^T L_ib (b <= a) and vectors
/// b_a = p_dot_a - f_ta - sum_{b<=a} A_ab (psi_b p_dot_b - f_tb)
///       - sum_{b<a} k_b psi_b A_ab e_b
/// of the error dynamics e_a' + k_a psi_a A_aa e_a = b_a.
struct ErrorDynamicsTerms {
  std::vector<std::vector<Mat>> A;  // A[a][b] valid for b <= a
  std::vector<Vec> b;
};
ErrorDynamicsTerms error_dynamics_terms(double t, const Vec& q,
                                        const PriorityDecomposition& decomp, const Mat& L,
                                        const TrackingSystem& ts);

/// Central-difference check of the error dynamics along a recorded run.
/// Interior nodes where min_a c_aa dips below exclusion_tol (or adjacent to
/// such a node) are excluded from the smooth-segment maximum and listed.
struct ResidualReport {
  Vec max_residual;                           // per task, included nodes only
  std::vector<std::vector<double>> per_node;  // [task][interior node k-1]
  std::vector<size_t> excluded;               // record indices
};
ResidualReport error_dynamics_residual(const TrajectoryRecord& rec, const TrackingSystem& ts,
                                       const SolverConfig& config, double exclusion_tol = 1e-3);

struct TaskConvergence {
  double int_eta_sq = 0.0, int_eta = 0.0, int_phi = 0.0;
  double inf_sigma_psiA = 0.0, inf_sigma_psiC = 0.0;
  double final_phi = 0.0;
  bool integral_bounded = false;  // running integrals plateaued
  bool error_converged = false;   // final phi below threshold
};
struct ConvergenceReport {
  std::vector<TaskConvergence> tasks;
  double int_u_norm = 0.0;
  double threshold = 0.0;
  bool all_integral_bounded = false;
  bool all_error_converged = false;
};
/// Trapezoidal integrals, sigma floors, and convergence verdicts. A running
/// integral counts as plateaued when the last 10% of the horizon adds at
/// most 1% of its total.
ConvergenceReport convergence_report(const TrajectoryRecord& rec, double threshold = 1e-3);

}  // namespace pik
