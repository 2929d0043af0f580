#pragma once

#include <string>
#include <vector>

namespace pik {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // human-readable measured values for the stdout line
  std::vector<std::pair<std::string, double>> measurements;
  double elapsed_s = 0.0;  // printed, never serialized
};

struct AcceptanceOptions {
  std::vector<int> only;     // empty -> all criteria
  std::string inject_fault;  // "" or a named fixture perturbation
};

/// Runs the acceptance criteria single-threaded with fixed seeds and pinned
/// tolerances. Prints one PASS/FAIL line per criterion as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// Deterministic report: same inputs give byte-identical files (no wall
/// times, fixed seeds).
void write_acceptance_json(const std::vector<CriterionResult>& results,
                           const std::string& fault, const std::string& path);

}  // namespace pik
