#include "pik/config.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <fstream>

#include "json.hpp"

using namespace pik;
using nlohmann::json;

namespace {

json base_config() {
  json j;
  j["system"]["type"] = "two-link";
  j["solver"]["alpha"] = 4;
  j["gains"] = {8.0, 8.0};
  j["target"]["constant"] = {1.0, 1.0};
  j["initial"]["q0"] = {0.3, 0.7};
  j["integrator"]["step"] = 1e-3;
  j["integrator"]["t_end"] = 1.0;
  j["outputs"]["csv"] = "trace.csv";
  j["outputs"]["json"] = "summary.json";
  return j;
}

std::string fail_field(const json& j) {
  try {
    parse_scenario_config(j.dump());
  } catch (const config_error& e) {
    return e.field;
  }
  return "(parsed)";
}

}  // namespace

TEST_CASE("minimal scenario parses with defaults", "[config]") {
  const ScenarioConfig cfg = parse_scenario_config(base_config().dump());
  REQUIRE(cfg.system.kind == SystemSpec::Kind::TwoLink);
  REQUIRE(cfg.system.L1 == 1.0);
  REQUIRE(cfg.system.L2 == 1.0);
  REQUIRE(cfg.system.n == 2);
  REQUIRE(cfg.solver.alpha == 4);
  REQUIRE(cfg.solver.damping.mu.empty());
  REQUIRE(cfg.gains == std::vector<double>{8.0, 8.0});
  REQUIRE(cfg.identity_activation);
  REQUIRE(cfg.target.kind == TargetSpec::Kind::Constant);
  REQUIRE(cfg.target.constant(0) == 1.0);
  REQUIRE(cfg.t0 == 0.0);
  REQUIRE(cfg.q0(1) == 0.7);
  REQUIRE(cfg.integrator.method == IntegratorConfig::Method::RK4);
  REQUIRE(cfg.integrator.step == 1e-3);
  REQUIRE(cfg.integrator.t_end == 1.0);
  REQUIRE_FALSE(cfg.integrator.singularity_guard);
  REQUIRE(cfg.csv_path == "trace.csv");
  REQUIRE(cfg.json_path == "summary.json");
  REQUIRE_FALSE(cfg.probe.has_value());
}

TEST_CASE("every optional knob round-trips", "[config]") {
  json j = base_config();
  j["system"] = {{"type", "three-link"}, {"L1", 0.8}, {"L2", 0.9}, {"L3", 0.7}};
  j["solver"] = {{"alpha", 1},        {"mu", {0.1, 0.2}},   {"nu", 2},
                 {"zero_tol", 1e-12}, {"rank_tol", 1e-10},  {"second_sweep", true}};
  j["activation"] = {{"r2", 0.4}, {"floor", 0.02}, {"smoothness", "C2"}};
  j["target"] = json::parse(R"({"waypoints":[{"t":0,"p":[1,1]},{"t":2,"p":[1.2,0.8]}]})");
  j["initial"] = {{"t0", 0.5}, {"q0", {0.1, 0.2, 0.3}}};
  j["integrator"] = {{"step", 0.01},         {"t_end", 4.0},      {"method", "dp54"},
                     {"min_step", 1e-5},     {"tolerance", 1e-9}, {"singularity_guard", true},
                     {"guard_det_tol", 0.05}};
  j["probe"] = {{"q_inf", {0.1, 0.2, 0.3}}, {"delta", 0.02},     {"samples", 4},
                {"horizon", 5.0},           {"seed", 9},         {"limit_tol", 1e-5},
                {"equil_tol", 1e-4}};

  const ScenarioConfig cfg = parse_scenario_config(j.dump());
  REQUIRE(cfg.system.kind == SystemSpec::Kind::ThreeLink);
  REQUIRE(cfg.system.L3 == 0.7);
  REQUIRE(cfg.system.n == 3);
  REQUIRE(cfg.solver.alpha == 1);
  REQUIRE(cfg.solver.damping.mu == std::vector<double>{0.1, 0.2});
  REQUIRE(cfg.solver.damping.nu == 2);
  REQUIRE(cfg.solver.zero_tol == 1e-12);
  REQUIRE(cfg.solver.rank_tol == 1e-10);
  REQUIRE(cfg.solver.second_sweep);
  REQUIRE_FALSE(cfg.identity_activation);
  REQUIRE(cfg.activation.r2 == 0.4);
  REQUIRE(cfg.activation.floor == 0.02);
  REQUIRE(cfg.activation.smoothness == "C2");
  REQUIRE(cfg.target.kind == TargetSpec::Kind::Waypoints);
  REQUIRE(cfg.target.waypoints.size() == 2);
  REQUIRE(cfg.target.waypoints[1].t == 2.0);
  REQUIRE(cfg.t0 == 0.5);
  REQUIRE(cfg.integrator.method == IntegratorConfig::Method::DP54);
  REQUIRE(cfg.integrator.min_step == 1e-5);
  REQUIRE(cfg.integrator.tolerance == 1e-9);
  REQUIRE(cfg.integrator.singularity_guard);
  REQUIRE(cfg.integrator.guard_det_tol == 0.05);
  REQUIRE(cfg.probe.has_value());
  REQUIRE(cfg.probe->q_inf.size() == 3);
  REQUIRE(cfg.probe->delta == 0.02);
  REQUIRE(cfg.probe->samples == 4);
  REQUIRE(cfg.probe->horizon == 5.0);
  REQUIRE(cfg.probe->seed == 9);
  REQUIRE(cfg.probe->limit_tol == 1e-5);
  REQUIRE(cfg.probe->equil_tol == 1e-4);
}

TEST_CASE("initial-fk target", "[config]") {
  json j = base_config();
  j["target"]["constant"] = "initial-fk";
  const ScenarioConfig cfg = parse_scenario_config(j.dump());
  REQUIRE(cfg.target.kind == TargetSpec::Kind::InitialFk);
}

TEST_CASE("builtin-random system", "[config]") {
  json j = base_config();
  j["system"] = {{"type", "builtin-random"},
                 {"seed", 5},
                 {"dims", {{"tasks", {2, 2}}, {"n", 6}, {"rank", 3}}}};
  j["gains"] = {4.0, 4.0};
  j["target"]["constant"] = {1.0, 1.0, 1.0, 1.0};
  j["initial"]["q0"] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const ScenarioConfig cfg = parse_scenario_config(j.dump());
  REQUIRE(cfg.system.kind == SystemSpec::Kind::BuiltinRandom);
  REQUIRE(cfg.system.seed == 5);
  REQUIRE(cfg.system.task_dims == std::vector<int>{2, 2});
  REQUIRE(cfg.system.n == 6);
  REQUIRE(cfg.system.rank == 3);
}

TEST_CASE("errors carry the offending field path", "[config]") {
  {
    json j = base_config();
    j["solver"]["alpha"] = 5;
    REQUIRE(fail_field(j) == "solver.alpha");
  }
  {
    json j = base_config();
    j["foo"] = 1;
    REQUIRE(fail_field(j) == "foo");
  }
  {
    json j = base_config();
    j["system"]["L4"] = 1.0;
    REQUIRE(fail_field(j) == "system.L4");
  }
  {
    json j = base_config();
    j.erase("gains");
    REQUIRE(fail_field(j) == "gains");
  }
  {
    json j = base_config();
    j["gains"] = {8.0};
    REQUIRE(fail_field(j) == "gains");
  }
  {
    json j = base_config();
    j["gains"] = {8.0, 0.0};
    REQUIRE(fail_field(j) == "gains[1]");
  }
  {
    json j = base_config();
    j["target"]["waypoints"] = json::parse(R"([{"t":0,"p":[1,1]},{"t":1,"p":[1,1]}])");
    REQUIRE(fail_field(j) == "target");
  }
  {
    json j = base_config();
    j["target"].erase("constant");
    REQUIRE(fail_field(j) == "target");
  }
  {
    json j = base_config();
    j["target"].erase("constant");
    j["target"]["waypoints"] = json::parse(R"([{"t":0,"p":[1,1]}])");
    REQUIRE(fail_field(j) == "target.waypoints");
  }
  {
    json j = base_config();
    j["target"].erase("constant");
    j["target"]["waypoints"] = json::parse(R"([{"t":0,"p":[1,1]},{"t":0,"p":[1,1]}])");
    REQUIRE(fail_field(j) == "target.waypoints[1].t");
  }
  {
    json j = base_config();
    j["target"].erase("constant");
    j["target"]["waypoints"] = json::parse(R"([{"t":0,"p":[1,1]},{"t":1,"p":[1,1,1]}])");
    REQUIRE(fail_field(j) == "target.waypoints[1].p");
  }
  {
    json j = base_config();
    j["target"]["constant"] = "bogus";
    REQUIRE(fail_field(j) == "target.constant");
  }
  {
    json j = base_config();
    j["target"]["constant"] = {1.0, 1.0, 1.0};
    REQUIRE(fail_field(j) == "target.constant");
  }
  {
    json j = base_config();
    j["initial"]["q0"] = {0.1, 0.2, 0.3};
    REQUIRE(fail_field(j) == "initial.q0");
  }
  {
    json j = base_config();
    j["initial"].erase("q0");
    REQUIRE(fail_field(j) == "initial.q0");
  }
  {
    json j = base_config();
    j["solver"]["alpha"] = 1;
    REQUIRE(fail_field(j) == "solver.mu");
  }
  {
    json j = base_config();
    j["solver"]["alpha"] = 1;
    j["solver"]["mu"] = {-0.1, 0.2};
    REQUIRE(fail_field(j) == "solver.mu[0]");
  }
  {
    json j = base_config();
    j["solver"]["alpha"] = 1;
    j["solver"]["mu"] = {0.1};
    REQUIRE(fail_field(j) == "solver.mu");
  }
  {
    json j = base_config();
    j["solver"]["mu"] = {0.1, 0.1};
    j["solver"]["nu"] = -1;
    REQUIRE(fail_field(j) == "solver.nu");
  }
  {
    json j = base_config();
    j["integrator"]["method"] = "euler";
    REQUIRE(fail_field(j) == "integrator.method");
  }
  {
    json j = base_config();
    j["integrator"].erase("step");
    REQUIRE(fail_field(j) == "integrator.step");
  }
  {
    json j = base_config();
    j["integrator"]["step"] = 0.0;
    REQUIRE(fail_field(j) == "integrator");
  }
  {
    json j = base_config();
    j["activation"] = {{"r2", 1.5}, {"floor", 0.05}};
    REQUIRE(fail_field(j) == "activation");
  }
  {
    json j = base_config();
    j["activation"] = {{"r2", 0.5}};
    REQUIRE(fail_field(j) == "activation.floor");
  }
  {
    json j = base_config();
    j["activation"] = {{"r2", 0.5}, {"floor", 0.05}, {"glow", 1}};
    REQUIRE(fail_field(j) == "activation.glow");
  }
  {
    json j = base_config();
    j["activation"] = "bogus";
    REQUIRE(fail_field(j) == "activation");
  }
  {
    json j = base_config();
    j["probe"] = {{"q_inf", {0.1, 0.2, 0.3}}, {"horizon", 5.0}};
    REQUIRE(fail_field(j) == "probe.q_inf");
  }
  {
    json j = base_config();
    j["probe"] = {{"q_inf", {0.1, 0.2}}};
    REQUIRE(fail_field(j) == "probe.horizon");
  }
  {
    json j = base_config();
    j["probe"] = {{"q_inf", {0.1, 0.2}}, {"horizon", 5.0}, {"delta", 0.0}};
    REQUIRE(fail_field(j) == "probe");
  }
  {
    json j = base_config();
    j["system"]["type"] = "four-link";
    REQUIRE(fail_field(j) == "system.type");
  }
  {
    json j = base_config();
    j["system"] = {{"type", "builtin-random"},
                   {"seed", 5},
                   {"dims", {{"tasks", {0, 2}}, {"n", 6}}}};
    REQUIRE(fail_field(j) == "system.dims.tasks[0]");
  }
  {
    json j = base_config();
    j["system"] = {{"type", "builtin-random"},
                   {"seed", -3},
                   {"dims", {{"tasks", {2, 2}}, {"n", 6}}}};
    REQUIRE(fail_field(j) == "system.seed");
  }
  {
    json j = base_config();
    j["outputs"].erase("csv");
    REQUIRE(fail_field(j) == "outputs.csv");
  }
}

TEST_CASE("error message prefixes the field path", "[config]") {
  json j = base_config();
  j["solver"]["alpha"] = 5;
  try {
    parse_scenario_config(j.dump());
    FAIL("expected config_error");
  } catch (const config_error& e) {
    REQUIRE(std::string(e.what()).rfind("solver.alpha: ", 0) == 0);
  }
}

TEST_CASE("invalid JSON text", "[config]") {
  try {
    parse_scenario_config("{ nope");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    REQUIRE(e.field == "config");
    REQUIRE(std::string(e.what()).find("invalid JSON") != std::string::npos);
  }
  REQUIRE(fail_field(json::array({1, 2})) == "config");
}

TEST_CASE("loading from a file", "[config]") {
  const std::string path = "config_test_tmp.json";
  {
    std::ofstream out(path);
    out << base_config().dump(2);
  }
  const ScenarioConfig cfg = load_scenario_config(path);
  REQUIRE(cfg.system.kind == SystemSpec::Kind::TwoLink);
  REQUIRE(cfg.q0(0) == 0.3);
  std::remove(path.c_str());

  try {
    load_scenario_config("does_not_exist.json");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    REQUIRE(e.field == "config");
    REQUIRE(std::string(e.what()).find("cannot open") != std::string::npos);
  }
}
