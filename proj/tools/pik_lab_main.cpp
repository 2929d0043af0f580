#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "pik/acceptance.hpp"
#include "pik/scenario.hpp"

namespace {

void print_error_json(const std::string& field, const std::string& message) {
  nlohmann::json j;
  if (field.empty())
    j["error"] = {{"message", message}};
  else
    j["error"] = {{"field", field}, {"message", message}};
  std::fprintf(stderr, "%s\n", j.dump().c_str());
}

double tol_scale_from_env() {
  const char* env = std::getenv("PIK_LAB_TOL");
  if (env == nullptr || *env == '\0') return 1.0;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v > 0.0)) {
    std::fprintf(stderr, "ignoring PIK_LAB_TOL=%s (expected a positive number)\n", env);
    return 1.0;
  }
  return v;
}

int run_one(const std::string& path, const pik::RunOptions& opts, bool probe_mode) {
  try {
    const pik::ScenarioConfig cfg = pik::load_scenario_config(path);
    return probe_mode ? pik::run_probe(cfg, opts) : pik::run_scenario(cfg, opts);
  } catch (const pik::config_error& e) {
    print_error_json(e.field, e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error_json("", e.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pik-lab: prioritized inverse kinematics scenario runner"};
  app.require_subcommand(1);

  std::vector<std::string> run_configs;
  std::string probe_config;
  std::string out_dir = ".";
  std::string report_path = "acceptance_report.json";
  std::string inject_fault;
  int jobs = 1;
  uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "integrate scenarios and write CSV/JSON artifacts");
  run->add_option("config", run_configs, "scenario config file(s)")->required();
  CLI::App* probe = app.add_subcommand("probe", "run the stability probe of a scenario");
  probe->add_option("config", probe_config, "scenario config file with a probe section")
      ->required();
  std::vector<int> only;
  CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--out", report_path, "acceptance report path");
  verify->add_option("--only", only, "criterion indices to run (default: all)");
  verify->add_option("--inject-fault", inject_fault, "perturb a named fixture (self-test)");

  for (CLI::App* sub : {run, probe}) {
    sub->add_option("--jobs", jobs, "parallel workers");
    sub->add_option("--seed", seed, "override config seeds");
    sub->add_option("--out-dir", out_dir, "directory for output artifacts");
  }

  CLI11_PARSE(app, argc, argv);

  pik::RunOptions opts;
  opts.out_dir = out_dir;
  opts.tol_scale = tol_scale_from_env();
  opts.jobs = jobs;
  if (run->count("--seed") || probe->count("--seed")) opts.seed_override = seed;

  if (verify->parsed()) {
    pik::AcceptanceOptions aopts;
    aopts.only = only;
    aopts.inject_fault = inject_fault;
    const std::vector<pik::CriterionResult> results = pik::run_acceptance(aopts);
    pik::write_acceptance_json(results, inject_fault, report_path);
    int passed = 0;
    for (const auto& r : results) passed += r.passed ? 1 : 0;
    std::printf("acceptance: %d/%zu passed\n", passed, results.size());
    return passed == static_cast<int>(results.size()) ? 0 : 1;
  }

  if (probe->parsed()) return run_one(probe_config, opts, true);

  if (run_configs.size() == 1 || jobs <= 1) {
    int status = 0;
    for (const std::string& path : run_configs) status = std::max(status, run_one(path, opts, false));
    return status;
  }

  std::vector<int> codes(run_configs.size(), 0);
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min<int>(jobs, static_cast<int>(run_configs.size()));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < run_configs.size(); i = next.fetch_add(1))
        codes[i] = run_one(run_configs[i], opts, false);
    });
  }
  for (auto& th : pool) th.join();
  int status = 0;
  for (int c : codes) status = std::max(status, c);
  return status;
}
