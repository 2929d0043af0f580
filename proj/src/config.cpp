#include "pik/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pik {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw config_error(path, what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json& j, const std::string& path,
                const std::vector<std::string>& allowed) {
  if (!j.is_object()) fail(path.empty() ? "config" : path, "expected an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      fail(join(path, item.key()), "unknown field");
  }
}

const json& member(const json& j, const std::string& path, const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(join(path, key), "missing required field");
  return *it;
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

uint64_t as_seed(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !v.is_number_integer()) fail(path, "expected an integer");
  const int64_t s = v.get<int64_t>();
  if (s < 0) fail(path, "must be nonnegative");
  return static_cast<uint64_t>(s);
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

Vec as_vec(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of numbers");
  Vec out(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    out(static_cast<int>(i)) = as_double(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

SystemSpec parse_system(const json& j, const std::string& path) {
  SystemSpec out;
  const std::string type = as_string(member(j, path, "type"), join(path, "type"));
  if (type == "two-link") {
    check_keys(j, path, {"type", "L1", "L2"});
    out.kind = SystemSpec::Kind::TwoLink;
    if (j.contains("L1")) out.L1 = as_double(j["L1"], join(path, "L1"));
    if (j.contains("L2")) out.L2 = as_double(j["L2"], join(path, "L2"));
    out.task_dims = {1, 1};
    out.n = 2;
  } else if (type == "three-link") {
    check_keys(j, path, {"type", "L1", "L2", "L3"});
    out.kind = SystemSpec::Kind::ThreeLink;
    if (j.contains("L1")) out.L1 = as_double(j["L1"], join(path, "L1"));
    if (j.contains("L2")) out.L2 = as_double(j["L2"], join(path, "L2"));
    if (j.contains("L3")) out.L3 = as_double(j["L3"], join(path, "L3"));
    out.task_dims = {1, 1};
    out.n = 3;
  } else if (type == "builtin-random") {
    check_keys(j, path, {"type", "seed", "dims"});
    out.kind = SystemSpec::Kind::BuiltinRandom;
    out.seed = as_seed(member(j, path, "seed"), join(path, "seed"));
    const json& dims = member(j, path, "dims");
    const std::string dpath = join(path, "dims");
    check_keys(dims, dpath, {"tasks", "n", "rank"});
    const json& tasks = member(dims, dpath, "tasks");
    if (!tasks.is_array() || tasks.empty()) fail(join(dpath, "tasks"), "expected a non-empty array");
    out.task_dims.clear();
    for (size_t i = 0; i < tasks.size(); ++i) {
      const int d = as_int(tasks[i], join(dpath, "tasks") + "[" + std::to_string(i) + "]");
      if (d < 1) fail(join(dpath, "tasks") + "[" + std::to_string(i) + "]", "must be positive");
      out.task_dims.push_back(d);
    }
    out.n = as_int(member(dims, dpath, "n"), join(dpath, "n"));
    if (out.n < 1) fail(join(dpath, "n"), "must be positive");
    if (dims.contains("rank")) out.rank = as_int(dims["rank"], join(dpath, "rank"));
  } else {
    fail(join(path, "type"), "expected one of: two-link, three-link, builtin-random");
  }
  return out;
}

SolverConfig parse_solver(const json& j, const std::string& path) {
  check_keys(j, path, {"alpha", "mu", "nu", "zero_tol", "rank_tol", "second_sweep"});
  SolverConfig out;
  out.alpha = as_int(member(j, path, "alpha"), join(path, "alpha"));
  if (out.alpha < 1 || out.alpha > 4) fail(join(path, "alpha"), "must be 1, 2, 3, or 4");
  if (j.contains("mu")) {
    const Vec mu = as_vec(j["mu"], join(path, "mu"));
    out.damping.mu.assign(mu.data(), mu.data() + mu.size());
    for (size_t a = 0; a < out.damping.mu.size(); ++a)
      if (out.damping.mu[a] < 0.0)
        fail(join(path, "mu") + "[" + std::to_string(a) + "]", "must be nonnegative");
  } else if (out.alpha != 4) {
    fail(join(path, "mu"), "missing required field (alpha 1-3 uses damping)");
  }
  if (j.contains("nu")) {
    out.damping.nu = as_int(j["nu"], join(path, "nu"));
    if (out.damping.nu < 0) fail(join(path, "nu"), "must be nonnegative");
  }
  if (j.contains("zero_tol")) out.zero_tol = as_double(j["zero_tol"], join(path, "zero_tol"));
  if (j.contains("rank_tol")) out.rank_tol = as_double(j["rank_tol"], join(path, "rank_tol"));
  if (j.contains("second_sweep"))
    out.second_sweep = as_bool(j["second_sweep"], join(path, "second_sweep"));
  return out;
}

TargetSpec parse_target(const json& j, const std::string& path) {
  check_keys(j, path, {"constant", "waypoints"});
  if (j.contains("constant") == j.contains("waypoints"))
    fail(path, "expected exactly one of: constant, waypoints");
  TargetSpec out;
  if (j.contains("constant")) {
    const json& c = j["constant"];
    if (c.is_string()) {
      if (as_string(c, join(path, "constant")) != "initial-fk")
        fail(join(path, "constant"), "expected an array or the string \"initial-fk\"");
      out.kind = TargetSpec::Kind::InitialFk;
    } else {
      out.kind = TargetSpec::Kind::Constant;
      out.constant = as_vec(c, join(path, "constant"));
    }
  } else {
    out.kind = TargetSpec::Kind::Waypoints;
    const json& w = j["waypoints"];
    const std::string wpath = join(path, "waypoints");
    if (!w.is_array() || w.size() < 2) fail(wpath, "expected an array of at least two waypoints");
    for (size_t i = 0; i < w.size(); ++i) {
      const std::string ipath = wpath + "[" + std::to_string(i) + "]";
      check_keys(w[i], ipath, {"t", "p"});
      Waypoint wp;
      wp.t = as_double(member(w[i], ipath, "t"), join(ipath, "t"));
      wp.p = as_vec(member(w[i], ipath, "p"), join(ipath, "p"));
      if (i > 0 && wp.t <= out.waypoints.back().t)
        fail(join(ipath, "t"), "waypoint times must be strictly increasing");
      if (i > 0 && wp.p.size() != out.waypoints.front().p.size())
        fail(join(ipath, "p"), "waypoint dimensions must agree");
      out.waypoints.push_back(std::move(wp));
    }
  }
  return out;
}

IntegratorConfig parse_integrator(const json& j, const std::string& path) {
  check_keys(j, path, {"step", "t_end", "method", "min_step", "tolerance", "singularity_guard",
                       "guard_det_tol"});
  IntegratorConfig out;
  out.step = as_double(member(j, path, "step"), join(path, "step"));
  out.t_end = as_double(member(j, path, "t_end"), join(path, "t_end"));
  if (j.contains("method")) {
    const std::string m = as_string(j["method"], join(path, "method"));
    if (m == "rk4")
      out.method = IntegratorConfig::Method::RK4;
    else if (m == "dp54")
      out.method = IntegratorConfig::Method::DP54;
    else
      fail(join(path, "method"), "expected one of: rk4, dp54");
  }
  if (j.contains("min_step")) out.min_step = as_double(j["min_step"], join(path, "min_step"));
  if (j.contains("tolerance")) out.tolerance = as_double(j["tolerance"], join(path, "tolerance"));
  if (j.contains("singularity_guard"))
    out.singularity_guard = as_bool(j["singularity_guard"], join(path, "singularity_guard"));
  if (j.contains("guard_det_tol"))
    out.guard_det_tol = as_double(j["guard_det_tol"], join(path, "guard_det_tol"));
  try {
    out.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return out;
}

ProbeConfig parse_probe(const json& j, const std::string& path) {
  check_keys(j, path, {"q_inf", "delta", "samples", "horizon", "seed", "limit_tol", "equil_tol"});
  ProbeConfig out;
  out.q_inf = as_vec(member(j, path, "q_inf"), join(path, "q_inf"));
  if (j.contains("delta")) out.delta = as_double(j["delta"], join(path, "delta"));
  if (j.contains("samples")) out.samples = as_int(j["samples"], join(path, "samples"));
  out.horizon = as_double(member(j, path, "horizon"), join(path, "horizon"));
  if (j.contains("seed")) out.seed = as_seed(j["seed"], join(path, "seed"));
  if (j.contains("limit_tol")) out.limit_tol = as_double(j["limit_tol"], join(path, "limit_tol"));
  if (j.contains("equil_tol")) out.equil_tol = as_double(j["equil_tol"], join(path, "equil_tol"));
  try {
    out.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return out;
}

ScenarioConfig parse_root(const json& j) {
  check_keys(j, "", {"system", "solver", "gains", "activation", "target", "initial", "integrator",
                     "outputs", "probe"});
  ScenarioConfig out;
  out.system = parse_system(member(j, "", "system"), "system");
  out.solver = parse_solver(member(j, "", "solver"), "solver");

  const Vec k = as_vec(member(j, "", "gains"), "gains");
  if (k.size() != static_cast<long>(out.system.task_dims.size()))
    fail("gains", "expected one gain per task (" +
                      std::to_string(out.system.task_dims.size()) + ")");
  for (int a = 0; a < k.size(); ++a)
    if (!(k(a) > 0.0)) fail("gains[" + std::to_string(a) + "]", "must be positive");
  out.gains.assign(k.data(), k.data() + k.size());

  if (j.contains("activation")) {
    const json& act = j["activation"];
    if (act.is_string()) {
      if (as_string(act, "activation") != "identity")
        fail("activation", "expected an object or the string \"identity\"");
      out.identity_activation = true;
    } else {
      check_keys(act, "activation", {"r2", "floor", "smoothness"});
      out.identity_activation = false;
      out.activation.r2 = as_double(member(act, "activation", "r2"), "activation.r2");
      out.activation.floor = as_double(member(act, "activation", "floor"), "activation.floor");
      if (act.contains("smoothness"))
        out.activation.smoothness = as_string(act["smoothness"], "activation.smoothness");
      try {
        out.activation.validate();
      } catch (const std::exception& e) {
        fail("activation", e.what());
      }
    }
  }

  out.target = parse_target(member(j, "", "target"), "target");

  {
    const json& init = member(j, "", "initial");
    check_keys(init, "initial", {"t0", "q0"});
    if (init.contains("t0")) out.t0 = as_double(init["t0"], "initial.t0");
    out.q0 = as_vec(member(init, "initial", "q0"), "initial.q0");
    if (out.q0.size() != out.system.n)
      fail("initial.q0", "expected dimension " + std::to_string(out.system.n));
  }

  out.integrator = parse_integrator(member(j, "", "integrator"), "integrator");

  {
    const json& outputs = member(j, "", "outputs");
    check_keys(outputs, "outputs", {"csv", "json"});
    out.csv_path = as_string(member(outputs, "outputs", "csv"), "outputs.csv");
    out.json_path = as_string(member(outputs, "outputs", "json"), "outputs.json");
  }

  if (j.contains("probe")) {
    out.probe = parse_probe(j["probe"], "probe");
    if (out.probe->q_inf.size() != out.system.n)
      fail("probe.q_inf", "expected dimension " + std::to_string(out.system.n));
  }

  const int m = [&] {
    int s = 0;
    for (int d : out.system.task_dims) s += d;
    return s;
  }();
  if (out.target.kind == TargetSpec::Kind::Constant && out.target.constant.size() != m)
    fail("target.constant", "expected dimension " + std::to_string(m));
  if (out.target.kind == TargetSpec::Kind::Waypoints &&
      out.target.waypoints.front().p.size() != m)
    fail("target.waypoints", "expected waypoint dimension " + std::to_string(m));
  if (out.solver.alpha != 4 &&
      out.solver.damping.mu.size() != out.system.task_dims.size())
    fail("solver.mu", "expected one entry per task (" +
                          std::to_string(out.system.task_dims.size()) + ")");
  return out;
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_root(j);
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config", "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_config(buf.str());
}

}  // namespace pik
