#include "pik/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "pik/csv.hpp"
#include "pik/random_system.hpp"
#include "pik/three_link.hpp"
#include "pik/two_link.hpp"

namespace pik {

namespace {

using nlohmann::json;

std::function<Vec(double, const Vec&)> make_psi(const ScenarioConfig& cfg) {
  if (cfg.identity_activation)
    return identity_activation(static_cast<int>(cfg.system.task_dims.size()));
  if (cfg.system.kind != SystemSpec::Kind::TwoLink)
    throw config_error("activation", "lattice activation is defined for two-link systems only");
  return build_activation(cfg.activation, cfg.solver.alpha);
}

std::function<TargetValue(double)> make_target(const ScenarioConfig& cfg,
                                               const std::function<Vec(double)>& initial_fk) {
  switch (cfg.target.kind) {
    case TargetSpec::Kind::Constant:
      return constant_target(cfg.target.constant);
    case TargetSpec::Kind::InitialFk:
      return constant_target(initial_fk(cfg.t0));
    case TargetSpec::Kind::Waypoints: {
      WaypointPath path(cfg.target.waypoints);
      return [path](double t) { return path(t); };
    }
  }
  throw std::logic_error("unreachable");
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json convergence_to_json(const ConvergenceReport& rep) {
  json tasks = json::array();
  for (const TaskConvergence& tc : rep.tasks) {
    tasks.push_back({{"final_phi", tc.final_phi},
                     {"int_phi", tc.int_phi},
                     {"int_eta", tc.int_eta},
                     {"int_eta_sq", tc.int_eta_sq},
                     {"inf_sigma_psiA", tc.inf_sigma_psiA},
                     {"inf_sigma_psiC", tc.inf_sigma_psiC},
                     {"integral_bounded", tc.integral_bounded},
                     {"error_converged", tc.error_converged}});
  }
  return {{"threshold", rep.threshold},
          {"tasks", tasks},
          {"int_u_norm", rep.int_u_norm},
          {"all_integral_bounded", rep.all_integral_bounded},
          {"all_error_converged", rep.all_error_converged}};
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw data_error("cannot open JSON output: " + path);
  out << j.dump(2) << "\n";
}

std::string out_path(const RunOptions& opts, const std::string& rel) {
  namespace fs = std::filesystem;
  fs::path p(rel);
  if (p.is_absolute()) return rel;
  fs::create_directories(opts.out_dir);
  return (fs::path(opts.out_dir) / p).string();
}

const char* system_name(SystemSpec::Kind k) {
  switch (k) {
    case SystemSpec::Kind::TwoLink: return "two-link";
    case SystemSpec::Kind::ThreeLink: return "three-link";
    case SystemSpec::Kind::BuiltinRandom: return "builtin-random";
  }
  return "?";
}

}  // namespace

BuiltScenario build_scenario(const ScenarioConfig& cfg, std::optional<uint64_t> seed_override) {
  BuiltScenario out;
  out.solver = cfg.solver;
  out.integrator = cfg.integrator;
  out.t0 = cfg.t0;
  out.q0 = cfg.q0;

  const auto psi = make_psi(cfg);

  switch (cfg.system.kind) {
    case SystemSpec::Kind::TwoLink: {
      TwoLinkParams params{cfg.system.L1, cfg.system.L2};
      const auto target = make_target(
          cfg, [&](double t) { return two_link_fk(params, t, cfg.q0).f; });
      out.ts = two_link_tracking(params, target, cfg.gains, psi);
      break;
    }
    case SystemSpec::Kind::ThreeLink: {
      ThreeLinkParams params{cfg.system.L1, cfg.system.L2, cfg.system.L3};
      const auto target = make_target(
          cfg, [&](double t) { return three_link_fk(params, t, cfg.q0).f; });
      out.ts = three_link_tracking(params, target, cfg.gains, psi);
      break;
    }
    case SystemSpec::Kind::BuiltinRandom: {
      out.prng_seed = seed_override.value_or(cfg.system.seed);
      out.prng_name = rng_name();
      Rng rng(out.prng_seed);
      const int m = [&] {
        int s = 0;
        for (int d : cfg.system.task_dims) s += d;
        return s;
      }();
      const LinearDraw d = random_linear_draw(rng, m, cfg.system.n, cfg.system.rank);
      const Mat A = d.J0 * d.R0;
      const auto target = make_target(cfg, [&](double) { return Vec(A * cfg.q0); });
      TrackingSystem ts;
      ts.task_dims = cfg.system.task_dims;
      ts.n = cfg.system.n;
      ts.f_eval = [A](double, const Vec& q) {
        TrackingValue v;
        v.f = A * q;
        v.Df = Mat::Zero(A.rows(), A.cols() + 1);
        v.Df.rightCols(A.cols()) = A;
        return v;
      };
      ts.p_eval = target;
      ts.gains = cfg.gains;
      ts.psi_eval = psi;
      ts.R_eval = [R0 = d.R0](double, const Vec&) { return R0; };
      out.ts = std::move(ts);
      break;
    }
  }
  out.ts.validate();
  out.solver.validate(out.ts.tasks());
  return out;
}

int run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  BuiltScenario sc = build_scenario(cfg, opts.seed_override);
  sc.integrator.tolerance *= opts.tol_scale;

  const TrajectoryRecord rec = integrate(sc.ts, sc.solver, sc.integrator, sc.t0, sc.q0);
  write_trace_csv(rec, out_path(opts, cfg.csv_path));

  const ConvergenceReport conv = convergence_report(rec, 1e-3 * opts.tol_scale);

  double min_abs_det = std::numeric_limits<double>::infinity();
  Vec min_diag;
  for (size_t k = 0; k < rec.steps(); ++k) {
    min_abs_det = std::min(min_abs_det, std::abs(rec.det_C[k]));
    if (k == 0)
      min_diag = rec.diag_c[k];
    else
      min_diag = min_diag.cwiseMin(rec.diag_c[k]);
  }

  json j;
  j["scenario"] = {{"system", system_name(cfg.system.kind)},
                   {"alpha", cfg.solver.alpha},
                   {"t0", sc.t0},
                   {"t_end", sc.integrator.t_end}};
  j["run"] = {{"completed", rec.completed},
              {"termination", rec.termination},
              {"blow_up", !rec.completed},
              {"steps", rec.steps()},
              {"final_time", rec.times.empty() ? sc.t0 : rec.times.back()},
              {"final_q", vec_to_json(rec.states.empty() ? sc.q0 : rec.states.back())},
              {"final_phi", rec.phi.empty() ? json::array() : vec_to_json(rec.phi.back())},
              {"guard_events", rec.guard_events}};
  j["convergence"] = convergence_to_json(conv);
  j["singularity"] = {{"min_abs_det_C", min_abs_det},
                      {"min_diag_c", rec.steps() ? vec_to_json(min_diag) : json::array()},
                      {"guard_event_count", rec.guard_events.size()}};
  if (!sc.prng_name.empty()) j["prng"] = {{"name", sc.prng_name}, {"seed", sc.prng_seed}};
  write_json(j, out_path(opts, cfg.json_path));

  return rec.completed ? 0 : 3;
}

int run_probe(const ScenarioConfig& cfg, const RunOptions& opts) {
  if (!cfg.probe) throw config_error("probe", "missing required field (probe mode)");
  BuiltScenario sc = build_scenario(cfg, opts.seed_override);

  ProbeConfig pcfg = *cfg.probe;
  pcfg.integrator = sc.integrator;
  pcfg.integrator.tolerance *= opts.tol_scale;
  pcfg.limit_tol *= opts.tol_scale;
  pcfg.equil_tol *= opts.tol_scale;
  pcfg.jobs = opts.jobs;
  if (opts.seed_override) pcfg.seed = *opts.seed_override;

  const StabilityProbeReport rep = stability_probe(sc.ts, sc.solver, pcfg);

  json samples = json::array();
  for (const ProbeSample& s : rep.samples) {
    samples.push_back({{"q0", vec_to_json(s.q0)},
                       {"limit", vec_to_json(s.limit)},
                       {"limit_distance", s.limit_distance},
                       {"max_excursion", s.max_excursion},
                       {"final_error", s.final_error},
                       {"velocity_at_limit", s.velocity_at_limit},
                       {"completed", s.completed},
                       {"lyapunov_nonincreasing", s.lyapunov_nonincreasing},
                       {"termination", s.termination}});
  }
  json j;
  j["scenario"] = {{"system", system_name(cfg.system.kind)}, {"alpha", cfg.solver.alpha}};
  j["probe"] = {{"q_inf", vec_to_json(rep.q_inf)},
                {"delta", rep.delta},
                {"samples", static_cast<int>(rep.samples.size())},
                {"seed", pcfg.seed},
                {"prng", rng_name()},
                {"equilibrium_residual", rep.equilibrium_residual},
                {"hypothesis_full_rank", rep.hypothesis_full_rank},
                {"hypothesis_min_activation", rep.hypothesis_min_activation},
                {"verdict", rep.verdict},
                {"note", rep.note}};
  j["samples"] = samples;
  write_json(j, out_path(opts, cfg.json_path));
  return 0;
}

}  // namespace pik
