#include "pik/priority_qr.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "pik/pinv.hpp"

namespace pik {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_task_dims(const std::vector<int>& task_dims, int m) {
  if (task_dims.size() < 1) throw std::domain_error("task_dims empty");
  int sum = 0;
  for (int d : task_dims) {
    if (d <= 0) throw std::domain_error("task_dims entries must be positive");
    sum += d;
  }
  if (sum != m) throw std::domain_error("task_dims must sum to row count");
}

std::vector<int> block_offsets(const std::vector<int>& task_dims) {
  std::vector<int> off(task_dims.size() + 1, 0);
  for (size_t a = 0; a < task_dims.size(); ++a) off[a + 1] = off[a] + task_dims[a];
  return off;
}
}  // namespace

Mat PriorityDecomposition::C_D() const {
  Mat d = Mat::Zero(rows(), rows());
  for (int a = 0; a < tasks(); ++a)
    d.block(offsets[a], offsets[a], task_dims[a], task_dims[a]) =
        C_e.block(offsets[a], offsets[a], task_dims[a], task_dims[a]);
  return d;
}

Mat PriorityDecomposition::C_block(int a, int b) const {
  if (a < 0 || a >= tasks() || b < 0 || b >= tasks())
    throw std::out_of_range("C_block: task index out of range");
  return C_e.block(offsets[a], offsets[b], task_dims[a], task_dims[b]);
}

Mat PriorityDecomposition::J_hat_block(int a) const {
  if (a < 0 || a >= tasks()) throw std::out_of_range("J_hat_block: task index out of range");
  return J_hat_e.middleRows(offsets[a], task_dims[a]);
}

PriorityDecomposition orthogonalize(const Mat& J, const std::vector<int>& task_dims,
                                    double zero_tol, bool second_sweep) {
  const int m = static_cast<int>(J.rows());
  const int n = static_cast<int>(J.cols());
  if (m == 0 || n == 0) throw std::domain_error("orthogonalize: zero-dimension matrix");
  if (m > n)
    throw std::domain_error("orthogonalize: more task rows than joints; pad with virtual joints");
  check_task_dims(task_dims, m);
  if (!all_finite(J)) throw data_error("orthogonalize: non-finite entries");

  const double tol =
      zero_tol > 0.0 ? zero_tol : static_cast<double>(std::max(m, n)) * kEps * J.norm();

  // Modified Gram-Schmidt over the columns of V = J^T, in priority order.
  // A pivot at or below tol zeroes its entire row of Rr and its q column.
  Mat V = J.transpose();          // n x m, columns v_1..v_m
  Mat Q = Mat::Zero(n, n);        // orthonormal columns; first m slots from MGS
  Mat Rr = Mat::Zero(m, m);       // upper triangular, J^T = Q_tilde * Rr
  std::vector<bool> live(m, false);

  auto mgs_pass = [&](Mat& src, Mat& rr) {
    for (int a = 0; a < m; ++a) {
      const double raa = src.col(a).norm();
      if (raa > tol) {
        live[a] = true;
        rr(a, a) = raa;
        Q.col(a) = src.col(a) / raa;
        for (int b = a + 1; b < m; ++b) {
          const double rab = Q.col(a).dot(src.col(b));
          rr(a, b) = rab;
          src.col(b) -= rab * Q.col(a);
        }
      } else {
        live[a] = false;
        Q.col(a).setZero();
        rr.row(a).setZero();
      }
    }
  };

  mgs_pass(V, Rr);

  if (second_sweep) {
    Mat V2 = Q.leftCols(m);
    Mat R2 = Mat::Zero(m, m);
    mgs_pass(V2, R2);
    Rr = R2 * Rr;  // J^T = Q2 (R2 R1); zero rows of R2 keep zeroed columns zero
  }

  // Fill the dead slots and the n - m extension with an orthonormal basis of
  // N(J): right singular vectors for the smallest singular values, in index
  // order, re-orthogonalized against everything already placed.
  std::vector<int> slots;
  for (int a = 0; a < m; ++a)
    if (!live[a]) slots.push_back(a);
  for (int a = m; a < n; ++a) slots.push_back(a);

  if (!slots.empty()) {
    Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
    const Mat& Vfull = svd.matrixV();
    std::vector<int> placed;
    for (int a = 0; a < m; ++a)
      if (live[a]) placed.push_back(a);

    size_t next_slot = 0;
    auto try_place = [&](Vec cand) {
      if (next_slot >= slots.size()) return;
      for (int pass = 0; pass < 2; ++pass)
        for (int idx : placed) cand -= Q.col(idx).dot(cand) * Q.col(idx);
      const double nrm = cand.norm();
      if (nrm > 1e-3) {
        Q.col(slots[next_slot]) = cand / nrm;
        placed.push_back(slots[next_slot]);
        ++next_slot;
      }
    };

    // Candidates in order of increasing singular value, then canonical axes
    // as a fallback when rank decisions disagree between MGS and the SVD.
    for (int i = n - 1; i >= 0 && next_slot < slots.size(); --i) try_place(Vfull.col(i));
    for (int i = 0; i < n && next_slot < slots.size(); ++i) try_place(Vec::Unit(n, i));
    if (next_slot < slots.size())
      throw data_error("orthogonalize: failed to complete orthonormal basis");
  }

  PriorityDecomposition d;
  d.task_dims = task_dims;
  d.offsets = block_offsets(task_dims);
  d.zero_tol_used = tol;
  d.C_e = Mat::Zero(m, n);
  d.C_e.leftCols(m) = Rr.transpose();
  d.J_hat_e = Q.transpose();
  return d;
}

Mat projector(const PriorityDecomposition& decomp, int a) {
  if (a < 0 || a >= decomp.tasks()) throw std::out_of_range("projector: task index out of range");
  const Mat Caa = decomp.C_diag_block(a);
  const Mat Ja_hat = decomp.J_hat_block(a);
  // C_aa^+ C_aa is the orthogonal projector onto the row space of C_aa.
  const Mat S = moore_penrose(Caa) * Caa;
  return Ja_hat.transpose() * S * Ja_hat;
}

SingularityReport singularity_metrics(const PriorityDecomposition& decomp, const Mat& J,
                                      double tol) {
  SingularityReport rep;
  const int m = decomp.rows();
  rep.diag_c = decomp.C_e.diagonal().head(m);
  rep.det_C = 1.0;
  for (int i = 0; i < m; ++i) rep.det_C *= rep.diag_c(i);

  const double t = tol >= 0.0 ? tol : decomp.zero_tol_used;

  Eigen::JacobiSVD<Mat> svd(J);
  const Vec& s = svd.singularValues();
  const double rtol =
      static_cast<double>(std::max(J.rows(), J.cols())) * kEps * (s.size() ? s(0) : 0.0);
  rep.rank_J = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rtol) ++rep.rank_J;

  rep.in_G_S = (rep.diag_c.minCoeff() > t);
  rep.in_H_S = (rep.rank_J == m);
  return rep;
}

}  // namespace pik
