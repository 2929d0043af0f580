#include "pik/pinv.hpp"

#include <cmath>
#include <limits>

namespace pik {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

double default_rank_tol(const Mat& A) {
  if (A.size() == 0) return 0.0;
  const double smax = A.jacobiSvd().singularValues()(0);
  return static_cast<double>(std::max(A.rows(), A.cols())) * kEps * smax;
}

Mat moore_penrose(const Mat& A, double rank_tol) {
  if (A.rows() == 0 || A.cols() == 0)
    throw std::domain_error("moore_penrose: zero-dimension matrix");
  if (!all_finite(A)) throw data_error("moore_penrose: non-finite entries");

  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  const double tol =
      rank_tol > 0.0
          ? rank_tol
          : static_cast<double>(std::max(A.rows(), A.cols())) * kEps * (s.size() ? s(0) : 0.0);

  Vec sinv = Vec::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) sinv(i) = 1.0 / s(i);
  return svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
}

Mat extended_damped_pinv(const Mat& A, const DampingValue& lambda_sq) {
  if (lambda_sq.infinite) return Mat::Zero(A.cols(), A.rows());
  if (lambda_sq.value < 0.0)
    throw std::domain_error("extended_damped_pinv: negative lambda^2");
  if (lambda_sq.value == 0.0) return moore_penrose(A);
  if (!all_finite(A)) throw data_error("extended_damped_pinv: non-finite entries");

  // A^T (A A^T + l2 I)^+ through the SVD of A: factors sigma / (sigma^2 + l2),
  // smooth in sigma, no rank decision needed once l2 > 0.
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  Vec d(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    d(i) = s(i) / (s(i) * s(i) + lambda_sq.value);
  return svd.matrixV() * d.asDiagonal() * svd.matrixU().transpose();
}

DampingValue damping_value(const Mat& M, double mu, int nu) {
  if (M.rows() != M.cols()) throw std::domain_error("damping_value: M not square");
  if (mu < 0.0) throw std::domain_error("damping_value: negative mu");
  if (nu < 0) throw std::domain_error("damping_value: negative nu");
  if (mu == 0.0) return DampingValue::finite(0.0);
  if (nu == 0) return DampingValue::finite(mu * mu);  // |M|^0 = 1 even at |M| = 0
  if (M.size() == 0) return DampingValue::finite(mu * mu);

  const double dim = static_cast<double>(M.rows());
  const double smax = M.jacobiSvd().singularValues()(0);
  // |M| is a product of squared singular values of C_aa, so the zero test
  // composes from the rank rule applied to C_aa (sigma_max(C) = sqrt(smax)).
  const double rank_tol_c = dim * kEps * std::sqrt(std::max(smax, 0.0));
  const double det_tol = std::pow(rank_tol_c, 2.0 * dim);

  const double det_pow = std::pow(std::abs(M.determinant()), static_cast<double>(nu));
  if (det_pow < det_tol || det_pow == 0.0) return DampingValue::inf();
  return DampingValue::finite(mu * mu / det_pow);
}

NormBoundPair pinv_norm_bound(const Mat& A, double mu, double nu) {
  if (A.size() == 0) return {0.0, mu == 0.0 ? std::numeric_limits<double>::infinity() : 0.5 / mu};
  Eigen::JacobiSVD<Mat> svd(A);
  const Vec& s = svd.singularValues();
  const double tol = static_cast<double>(std::max(A.rows(), A.cols())) * kEps * s(0);

  double m1 = 0.0;
  for (Eigen::Index i = s.size() - 1; i >= 0; --i) {
    if (s(i) > tol) {
      m1 = 1.0 / s(i);
      break;
    }
  }

  double m2 = std::numeric_limits<double>::infinity();
  if (mu > 0.0) {
    double prod = 1.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) prod *= std::pow(s(i), nu);
    m2 = prod / (2.0 * mu);
  }
  return {m1, m2};
}

}  // namespace pik
