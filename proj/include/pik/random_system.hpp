#pragma once

#include "pik/rng.hpp"
#include "pik/system.hpp"

namespace pik {

/// Matrix with iid standard normal entries.
Mat random_matrix(Rng& rng, int rows, int cols);

/// Matrix with the given rank, built as a product of two full-rank normal
/// factors. rank = 0 yields the zero matrix.
Mat random_matrix_with_rank(Rng& rng, int rows, int cols, int rank);

/// Splits m into l parts, each at least 1.
std::vector<int> random_task_partition(Rng& rng, int m, int l);

/// Coefficients of a constant linear system: F_q = J0 * R0, so the task
/// Jacobian J = F_q R0^{-1} equals J0 regardless of q. R0 is a random
/// well-conditioned matrix (identity plus a small normal perturbation).
struct LinearDraw {
  Mat J0;
  Mat R0;
  Vec r0;
};
LinearDraw random_linear_draw(Rng& rng, int m, int n, int rank);

KinematicSystem random_linear_system(Rng& rng, const std::vector<int>& task_dims, int n,
                                     int rank);

}  // namespace pik
