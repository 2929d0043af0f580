#pragma once

#include <string>

#include "pik/trajectory.hpp"

namespace pik {

/// Column contract, stable across releases:
///   t, q[0..n), u[0..n), e[0..m), phi[1..l], eta[1..l], rho[1..l],
///   gamma[1..l], detC, c_diag[1..m], sigma_min_psiA[1..l]
/// Values carry 17 significant digits so regression diffs are exact.
std::string trace_csv_header(const TrajectoryRecord& rec);
void write_trace_csv(const TrajectoryRecord& rec, const std::string& path);

std::string format_g17(double x);

}  // namespace pik
