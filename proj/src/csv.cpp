#include "pik/csv.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>

namespace pik {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string trace_csv_header(const TrajectoryRecord& rec) {
  const int l = rec.tasks();
  const int m = std::accumulate(rec.task_dims.begin(), rec.task_dims.end(), 0);
  std::string h = "t";
  auto block = [&h](const char* name, int count, int base) {
    for (int i = 0; i < count; ++i) h += "," + std::string(name) + std::to_string(base + i);
  };
  block("q", rec.n, 0);
  block("u", rec.n, 0);
  block("e", m, 0);
  block("phi", l, 1);
  block("eta", l, 1);
  block("rho", l, 1);
  block("gamma", l, 1);
  h += ",detC";
  block("c_diag", m, 1);
  block("sigma_min_psiA", l, 1);
  return h;
}

void write_trace_csv(const TrajectoryRecord& rec, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw data_error("cannot open CSV output: " + path);
  out << trace_csv_header(rec) << "\n";
  auto put_vec = [&out](const Vec& v) {
    for (int i = 0; i < v.size(); ++i) out << "," << format_g17(v(i));
  };
  for (size_t k = 0; k < rec.steps(); ++k) {
    out << format_g17(rec.times[k]);
    put_vec(rec.states[k]);
    put_vec(rec.velocities[k]);
    put_vec(rec.errors[k]);
    put_vec(rec.phi[k]);
    put_vec(rec.eta[k]);
    put_vec(rec.rho[k]);
    put_vec(rec.gamma[k]);
    out << "," << format_g17(rec.det_C[k]);
    put_vec(rec.diag_c[k]);
    put_vec(rec.sigma_min_psiA[k]);
    out << "\n";
  }
  if (!out) throw data_error("short write on CSV output: " + path);
}

}  // namespace pik
