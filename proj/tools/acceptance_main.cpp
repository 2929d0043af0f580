#include <chrono>
#include <cstdio>

#include "CLI11.hpp"
#include "pik/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite for the pik library"};
  std::string out_path = "acceptance_report.json";
  std::string inject_fault;
  std::vector<int> only;
  app.add_option("--out", out_path, "deterministic JSON report path");
  app.add_option("--only", only, "criterion indices to run (default: all)");
  app.add_option("--inject-fault", inject_fault, "perturb a named fixture (self-test)");
  CLI11_PARSE(app, argc, argv);

  pik::AcceptanceOptions opts;
  opts.only = only;
  opts.inject_fault = inject_fault;

  const auto start = std::chrono::steady_clock::now();
  const std::vector<pik::CriterionResult> results = pik::run_acceptance(opts);
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  pik::write_acceptance_json(results, inject_fault, out_path);

  int passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  std::printf("acceptance: %d/%zu passed [%.1fs total]\n", passed, results.size(), total);
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}
