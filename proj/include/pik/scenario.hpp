#pragma once

#include "pik/config.hpp"

namespace pik {

/// Everything a run needs, assembled from a parsed config. prng_name is
/// set only for builtin-random systems.
struct BuiltScenario {
  TrackingSystem ts;
  SolverConfig solver;
  IntegratorConfig integrator;
  double t0 = 0.0;
  Vec q0;
  std::string prng_name;
  uint64_t prng_seed = 0;
};

struct RunOptions {
  std::string out_dir = ".";
  std::optional<uint64_t> seed_override;
  double tol_scale = 1.0;  // PIK_LAB_TOL escape hatch
  int jobs = 1;
};

BuiltScenario build_scenario(const ScenarioConfig& cfg,
                             std::optional<uint64_t> seed_override = std::nullopt);

/// Integrate, write the CSV trace and JSON summary. Returns 0 when the run
/// reaches t_end; on blow-up the partial CSV is retained, the JSON is
/// flagged, and the exit status is nonzero.
int run_scenario(const ScenarioConfig& cfg, const RunOptions& opts);

/// Stability-probe mode; requires a probe section in the config. Writes the
/// JSON report. Returns 0 unless the probe errored outright.
int run_probe(const ScenarioConfig& cfg, const RunOptions& opts);

}  // namespace pik
