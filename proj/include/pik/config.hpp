#pragma once

#include <optional>
#include <string>

#include "pik/activation.hpp"
#include "pik/probe.hpp"
#include "pik/spline.hpp"

namespace pik {

struct SystemSpec {
  enum class Kind { TwoLink, ThreeLink, BuiltinRandom };
  Kind kind = Kind::TwoLink;
  double L1 = 1.0, L2 = 1.0, L3 = 1.0;
  uint64_t seed = 1;                 // builtin-random
  std::vector<int> task_dims = {1, 1};
  int n = 2;
  int rank = -1;                     // builtin-random; -1 means full
};

struct TargetSpec {
  enum class Kind { Constant, InitialFk, Waypoints };
  Kind kind = Kind::Constant;
  Vec constant;
  std::vector<Waypoint> waypoints;
};

/// Declarative scenario description, parsed strictly: unknown keys are
/// rejected and every error names the offending field path.
struct ScenarioConfig {
  SystemSpec system;
  SolverConfig solver;
  std::vector<double> gains;
  bool identity_activation = true;
  ActivationSpec activation;
  TargetSpec target;
  double t0 = 0.0;
  Vec q0;
  IntegratorConfig integrator;
  std::string csv_path = "trace.csv";
  std::string json_path = "summary.json";
  std::optional<ProbeConfig> probe;
};

ScenarioConfig parse_scenario_config(const std::string& text);
ScenarioConfig load_scenario_config(const std::string& path);

}  // namespace pik
