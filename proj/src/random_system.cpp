#include "pik/random_system.hpp"

#include <numeric>

namespace pik {

Mat random_matrix(Rng& rng, int rows, int cols) {
  Mat A(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) A(i, j) = rng.normal();
  return A;
}

Mat random_matrix_with_rank(Rng& rng, int rows, int cols, int rank) {
  if (rank < 0 || rank > std::min(rows, cols))
    throw std::domain_error("random_matrix_with_rank: rank out of range");
  if (rank == 0) return Mat::Zero(rows, cols);
  return random_matrix(rng, rows, rank) * random_matrix(rng, rank, cols);
}

std::vector<int> random_task_partition(Rng& rng, int m, int l) {
  if (l < 1 || m < l) throw std::domain_error("random_task_partition: need m >= l >= 1");
  std::vector<int> dims(l, 1);
  for (int extra = m - l; extra > 0; --extra) dims[static_cast<int>(rng.below(l))] += 1;
  return dims;
}

LinearDraw random_linear_draw(Rng& rng, int m, int n, int rank) {
  LinearDraw d;
  d.J0 = random_matrix_with_rank(rng, m, n, rank < 0 ? std::min(m, n) : rank);
  d.R0 = Mat::Identity(n, n) + 0.1 * random_matrix(rng, n, n);
  d.r0 = Vec(m);
  for (int i = 0; i < m; ++i) d.r0(i) = rng.normal();
  return d;
}

KinematicSystem random_linear_system(Rng& rng, const std::vector<int>& task_dims, int n,
                                     int rank) {
  const int m = std::accumulate(task_dims.begin(), task_dims.end(), 0);
  const LinearDraw d = random_linear_draw(rng, m, n, rank);

  KinematicSystem sys;
  sys.task_dims = task_dims;
  sys.n = n;
  sys.F_eval = [d](double, const Vec&) {
    FValue v;
    v.f_t = Vec::Zero(d.J0.rows());
    v.F_q = d.J0 * d.R0;
    return v;
  };
  sys.R_eval = [d](double, const Vec&) { return d.R0; };
  sys.r_eval = [d](double, const Vec&) { return d.r0; };
  sys.validate();
  return sys;
}

}  // namespace pik
