#pragma once

#include <vector>

#include "pik/types.hpp"

namespace pik {

/**
 * Priority-respecting full QR factorization of a stacked task Jacobian.
 *
 * For J (m x n, m <= n) partitioned into task row blocks J_1..J_l this holds
 *
 *     J = C_e * J_hat_e
 *
 * where C_e is m x n lower triangular with nonnegative diagonal and exactly
 * zero columns m+1..n, and J_hat_e is n x n orthogonal. Rows of J_hat_e beyond
 * the first m (and rows paired with a zero diagonal entry) form an orthonormal
 * basis of the null space of J. If a diagonal entry c_bb is zero the whole
 * column b of C_e is zero, so a rank-deficient task never contaminates the
 * blocks below it.
 *
 * Block views use 0-based task indices a in [0, l).
 */
struct PriorityDecomposition {
  Mat C_e;       // m x n, lower triangular, columns beyond m are zero
  Mat J_hat_e;   // n x n orthogonal
  std::vector<int> task_dims;
  std::vector<int> offsets;  // row offset of each task block, plus total m
  double zero_tol_used = 0.0;

  int tasks() const { return static_cast<int>(task_dims.size()); }
  int rows() const { return static_cast<int>(C_e.rows()); }
  int cols() const { return static_cast<int>(C_e.cols()); }

  Mat C() const { return C_e.leftCols(rows()); }
  Mat C_D() const;
  Mat C_L() const { return C() - C_D(); }
  Mat J_hat() const { return J_hat_e.topRows(rows()); }

  /// C_ab, the (a, b) task block of C; a, b in [0, l).
  Mat C_block(int a, int b) const;
  /// C_aa.
  Mat C_diag_block(int a) const { return C_block(a, a); }
  /// J_hat_a, rows of J_hat_e belonging to task a.
  Mat J_hat_block(int a) const;
};

struct SingularityReport {
  double det_C = 0.0;     // product of the diagonal c_aa
  Vec diag_c;             // the c_aa values, length m
  int rank_J = 0;         // numerical rank of J via SVD
  bool in_G_S = false;    // all diagonal entries above tolerance
  bool in_H_S = false;    // rank_J == m
};

/// Row-wise modified Gram-Schmidt on J^T with priority order preserved.
/// Pivots at or below zero_tol are treated as exact zeros (their C column and
/// orthonormal vector are zeroed). Zero slots and the n - m extension rows are
/// filled with an orthonormal basis of N(J) taken from the right singular
/// vectors of J in index order. zero_tol = 0 selects max(m, n) * eps * ||J||.
/// second_sweep runs one re-orthogonalization pass for ill-conditioned input.
/// m > n is a domain error; pad the system with virtual joints first.
PriorityDecomposition orthogonalize(const Mat& J, const std::vector<int>& task_dims,
                                    double zero_tol = 0.0, bool second_sweep = false);

/// Orthogonal projector P_a = J_hat_a^T C_aa^+ C_aa J_hat_a onto the row
/// space contributed by task a. Independent of the null-space completion.
Mat projector(const PriorityDecomposition& decomp, int a);

/// det(C), diagonal entries, rank of J, and the G_S / H_S membership flags.
/// tol < 0 reuses the zero tolerance recorded in the decomposition.
SingularityReport singularity_metrics(const PriorityDecomposition& decomp, const Mat& J,
                                      double tol = -1.0);

}  // namespace pik
