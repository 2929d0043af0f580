#include "pik/probe.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <thread>

#include "pik/rng.hpp"

namespace pik {

void ProbeConfig::validate() const {
  if (q_inf.size() == 0) throw std::domain_error("probe: q_inf is required");
  if (!(delta > 0.0)) throw std::domain_error("probe: delta must be positive");
  if (samples < 1) throw std::domain_error("probe: need at least one sample");
  if (!(horizon > 0.0)) throw std::domain_error("probe: horizon must be positive");
  if (jobs < 1) throw std::domain_error("probe: jobs must be positive");
}

namespace {

Vec ball_sample(Rng& rng, const Vec& center, double delta) {
  const int n = static_cast<int>(center.size());
  Vec offset(n);
  for (;;) {
    for (int i = 0; i < n; ++i) offset(i) = rng.uniform(-1.0, 1.0);
    if (offset.squaredNorm() <= 1.0) break;
  }
  return center + delta * offset;
}

ProbeSample run_sample(const TrackingSystem& ts, const KinematicSystem& sys,
                       const SolverConfig& config, const ProbeConfig& pcfg, const Vec& q0) {
  IntegratorConfig icfg = pcfg.integrator;
  icfg.t_end = pcfg.horizon;

  ProbeSample s;
  s.q0 = q0;
  const TrajectoryRecord rec = integrate(ts, config, icfg, 0.0, q0);
  s.completed = rec.completed;
  s.termination = rec.termination;
  if (rec.steps() == 0) return s;

  s.limit = rec.states.back();
  s.limit_distance = (s.limit - pcfg.q_inf).norm();
  s.final_error = rec.errors.back().norm();
  s.V.reserve(rec.steps());
  for (const Vec& e : rec.errors) s.V.push_back(0.5 * e.squaredNorm());
  for (const Vec& q : rec.states)
    s.max_excursion = std::max(s.max_excursion, (q - pcfg.q_inf).norm());

  const double t_settle = 0.01 * pcfg.horizon;
  s.lyapunov_nonincreasing = true;
  for (size_t k = 0; k + 1 < rec.steps(); ++k) {
    if (rec.times[k] < t_settle) continue;
    if (s.V[k + 1] > s.V[k] + 1e-10) {
      s.lyapunov_nonincreasing = false;
      break;
    }
  }

  if (s.completed) {
    try {
      s.velocity_at_limit = pik_velocity(pcfg.horizon, s.limit, sys, config).u.norm();
    } catch (const std::exception&) {
      s.velocity_at_limit = std::numeric_limits<double>::infinity();
    }
  }
  return s;
}

}  // namespace

StabilityProbeReport stability_probe(const TrackingSystem& ts, const SolverConfig& config,
                                     const ProbeConfig& pcfg) {
  pcfg.validate();
  if (pcfg.q_inf.size() != ts.n) throw std::domain_error("probe: q_inf dimension mismatch");

  const KinematicSystem sys = as_kinematic(ts);
  StabilityProbeReport rep;
  rep.q_inf = pcfg.q_inf;
  rep.delta = pcfg.delta;

  const TrackingValue tv = ts.f_eval(0.0, pcfg.q_inf);
  rep.equilibrium_residual = (ts.p_eval(0.0).p - tv.f).norm();
  {
    const VelocityResult vr = pik_velocity(0.0, pcfg.q_inf, sys, config);
    rep.hypothesis_full_rank = vr.report.in_H_S;
    const Vec psi =
        ts.psi_eval ? ts.psi_eval(0.0, pcfg.q_inf) : Vec::Ones(ts.tasks());
    rep.hypothesis_min_activation = psi.minCoeff();
  }

  Rng rng(pcfg.seed);
  std::vector<Vec> starts;
  starts.reserve(pcfg.samples);
  for (int i = 0; i < pcfg.samples; ++i) starts.push_back(ball_sample(rng, pcfg.q_inf, pcfg.delta));

  rep.samples.resize(pcfg.samples);
  const int jobs = std::min(pcfg.jobs, pcfg.samples);
  if (jobs <= 1) {
    for (int i = 0; i < pcfg.samples; ++i)
      rep.samples[i] = run_sample(ts, sys, config, pcfg, starts[i]);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < pcfg.samples; i = next.fetch_add(1))
          rep.samples[i] = run_sample(ts, sys, config, pcfg, starts[i]);
      });
    }
    for (auto& th : pool) th.join();
  }

  bool all_completed = true, all_return = true, all_equilibrium = true;
  for (const ProbeSample& s : rep.samples) {
    all_completed = all_completed && s.completed;
    all_return = all_return && s.limit_distance <= pcfg.limit_tol;
    all_equilibrium = all_equilibrium && s.final_error <= pcfg.limit_tol &&
                      s.velocity_at_limit <= pcfg.equil_tol;
  }

  if (!all_completed) {
    rep.verdict = "inconclusive";
    rep.note = "integration failure in at least one sample";
  } else if (all_return) {
    rep.verdict = "asymptotically-stable-evidence";
  } else if (all_equilibrium) {
    rep.verdict = "semistable-evidence";
  } else {
    rep.verdict = "inconclusive";
    rep.note = "limit points neither return to q_inf nor all reach zero-error equilibria";
  }
  return rep;
}

}  // namespace pik
