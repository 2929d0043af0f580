#pragma once

#include "pik/trajectory.hpp"

namespace pik {

struct ProbeConfig {
  Vec q_inf;
  double delta = 0.05;
  int samples = 32;
  double horizon = 20.0;
  uint64_t seed = 1;
  /// Limit points within this of q_inf count as returns; task errors within
  /// this of zero count as on-target.
  double limit_tol = 1e-4;
  /// A limit point counts as an equilibrium when the commanded velocity
  /// there has norm at most this.
  double equil_tol = 1e-3;
  int jobs = 1;
  IntegratorConfig integrator;

  void validate() const;
};

struct ProbeSample {
  Vec q0;
  Vec limit;
  double max_excursion = 0.0;    // sup_t ||q(t) - q_inf||
  double final_error = 0.0;      // ||e(T)||
  double limit_distance = 0.0;   // ||limit - q_inf||
  double velocity_at_limit = 0.0;
  std::vector<double> V;         // V(q(t_k)) = 0.5 <e, e>
  bool completed = false;
  bool lyapunov_nonincreasing = false;  // after the first 1% of the horizon, slack 1e-10
  std::string termination;
};

/// Evidence labels from finite sampling, never proofs.
struct StabilityProbeReport {
  Vec q_inf;
  double delta = 0.0;
  double equilibrium_residual = 0.0;   // ||f(q_inf) - p(0)||
  bool hypothesis_full_rank = false;   // rank C_aa(q_inf) full per task
  double hypothesis_min_activation = 0.0;
  std::vector<ProbeSample> samples;
  std::string verdict;  // asymptotically-stable-evidence | semistable-evidence | inconclusive
  std::string note;
};

/// Integrates from `samples` points uniform in q_inf + delta B, records
/// excursions, limit points, and Lyapunov traces, and grades the batch:
/// every limit back at q_inf -> asymptotically-stable-evidence; every limit
/// a zero-error equilibrium somewhere -> semistable-evidence; anything else
/// (including an integration failure) -> inconclusive.
StabilityProbeReport stability_probe(const TrackingSystem& ts, const SolverConfig& config,
                                     const ProbeConfig& pcfg);

}  // namespace pik
