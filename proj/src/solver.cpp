#include "pik/solver.hpp"

#include <cmath>
#include <limits>

namespace pik {

namespace {

Mat block_diag_pinv(const Mat& base, const DampingValue& lam, double rank_tol) {
  // (base + lambda^2 I)^+, zero when the damping is infinite.
  const int d = static_cast<int>(base.rows());
  if (lam.infinite) return Mat::Zero(d, d);
  return moore_penrose(base + lam.value * Mat::Identity(d, d), rank_tol);
}

std::vector<DampingValue> task_damping(const PriorityDecomposition& decomp,
                                       const SolverConfig& config) {
  const int l = decomp.tasks();
  std::vector<DampingValue> lam(l);
  for (int a = 0; a < l; ++a) {
    const Mat Caa = decomp.C_diag_block(a);
    lam[a] = damping_value(Caa * Caa.transpose(), config.damping.mu[a], config.damping.nu);
  }
  return lam;
}

}  // namespace

Vec residual_reference(double t, const Vec& q, const KinematicSystem& S) {
  const FValue fv = S.F_eval(t, q);
  const Vec r = S.r_eval(t, q);
  if (!all_finite(fv.f_t) || !all_finite(r))
    throw data_error("residual_reference: evaluator returned non-finite values");
  return r - fv.f_t;
}

Mat solver_gain_matrix(const PriorityDecomposition& decomp, const Mat& J,
                       const SolverConfig& config) {
  const int l = decomp.tasks();
  const int m = decomp.rows();
  config.validate(l);

  if (config.alpha == 4) return Mat::Identity(m, m);

  const auto lam = task_damping(decomp, config);
  const auto& off = decomp.offsets;

  if (config.alpha == 2) {
    Mat H = Mat::Zero(m, m);
    for (int a = 0; a < l; ++a) {
      const Mat Ja = J.middleRows(off[a], decomp.task_dims[a]);
      H.block(off[a], off[a], decomp.task_dims[a], decomp.task_dims[a]) =
          block_diag_pinv(Ja * Ja.transpose(), lam[a], config.rank_tol);
    }
    return H;
  }

  Mat D = Mat::Zero(m, m);
  for (int a = 0; a < l; ++a) {
    const Mat Caa = decomp.C_diag_block(a);
    D.block(off[a], off[a], decomp.task_dims[a], decomp.task_dims[a]) =
        block_diag_pinv(Caa * Caa.transpose(), lam[a], config.rank_tol);
  }
  if (config.alpha == 3) return D;

  // alpha = 1: L = D (I + C_L C_D~)^{-1}. The product C_L C_D~ is strictly
  // block lower triangular, so I + C_L C_D~ is unit block-lower-triangular
  // and inverts exactly by forward block substitution.
  Mat CDstar = Mat::Zero(m, m);
  for (int a = 0; a < l; ++a) {
    const Mat Caa = decomp.C_diag_block(a);
    CDstar.block(off[a], off[a], decomp.task_dims[a], decomp.task_dims[a]) =
        Caa.transpose() * D.block(off[a], off[a], decomp.task_dims[a], decomp.task_dims[a]);
  }
  const Mat T = Mat::Identity(m, m) + decomp.C_L() * CDstar;

  Mat X = Mat::Zero(m, m);
  for (int c = 0; c < l; ++c) {
    X.block(off[c], off[c], decomp.task_dims[c], decomp.task_dims[c]) =
        Mat::Identity(decomp.task_dims[c], decomp.task_dims[c]);
    for (int a = c + 1; a < l; ++a) {
      Mat acc = Mat::Zero(decomp.task_dims[a], decomp.task_dims[c]);
      for (int k = c; k < a; ++k)
        acc -= T.block(off[a], off[k], decomp.task_dims[a], decomp.task_dims[k]) *
               X.block(off[k], off[c], decomp.task_dims[k], decomp.task_dims[c]);
      X.block(off[a], off[c], decomp.task_dims[a], decomp.task_dims[c]) = acc;
    }
  }

  Mat L = D * X;
  if (!all_finite(L)) throw std::runtime_error("solver_gain_matrix: gain matrix not finite");
  return L;
}

VelocityResult pik_velocity(double t, const Vec& q, const KinematicSystem& S,
                            const SolverConfig& config) {
  S.validate();
  if (q.size() != S.n) throw std::domain_error("pik_velocity: state dimension mismatch");

  const FValue fv = S.F_eval(t, q);
  if (fv.f_t.size() != S.m() || fv.F_q.rows() != S.m() || fv.F_q.cols() != S.n)
    throw std::domain_error("pik_velocity: F evaluator dimension mismatch");
  if (!all_finite(fv.f_t) || !all_finite(fv.F_q))
    throw data_error("pik_velocity: F evaluator returned NaN");

  const Mat R = S.R_eval(t, q);
  if (R.rows() != S.n || R.cols() != S.n)
    throw std::domain_error("pik_velocity: R evaluator dimension mismatch");
  if (!all_finite(R)) throw data_error("pik_velocity: R evaluator returned NaN");
  Eigen::FullPivLU<Mat> lu(R);
  if (!lu.isInvertible()) throw std::domain_error("pik_velocity: R not invertible");

  const Vec r = S.r_eval(t, q);
  if (r.size() != S.m()) throw std::domain_error("pik_velocity: r evaluator dimension mismatch");
  if (!all_finite(r)) throw data_error("pik_velocity: r evaluator returned NaN");

  VelocityResult out;
  out.J = fv.F_q * lu.inverse();
  out.R = R;
  out.r_prime = r - fv.f_t;
  out.decomp = orthogonalize(out.J, S.task_dims, config.zero_tol, config.second_sweep);
  out.L = solver_gain_matrix(out.decomp, out.J, config);
  out.u = lu.solve(out.decomp.J_hat().transpose() *
                   (out.decomp.C_D().transpose() * (out.L * out.r_prime)));
  out.report = singularity_metrics(out.decomp, out.J);
  return out;
}

std::vector<Vec> task_residuals(double t, const Vec& q, const Vec& u, const KinematicSystem& S,
                                const SolverConfig& config) {
  (void)config;
  const FValue fv = S.F_eval(t, q);
  const Vec r = S.r_eval(t, q);
  // J_a R u = F_qa u since J = F_q R^{-1}.
  const Vec res = (r - fv.f_t) - fv.F_q * u;
  std::vector<Vec> out;
  int row = 0;
  for (int d : S.task_dims) {
    out.push_back(res.segment(row, d));
    row += d;
  }
  return out;
}

double velocity_norm_bound(const PriorityDecomposition& decomp, const SolverConfig& config,
                           double R_inv_norm, double r_prime_norm) {
  const int l = decomp.tasks();
  const double inf = std::numeric_limits<double>::infinity();

  double cd_norm = 0.0;
  for (int a = 0; a < l; ++a) {
    const Mat Caa = decomp.C_diag_block(a);
    cd_norm = std::max(cd_norm, Caa.jacobiSvd().singularValues()(0));
  }

  double bl = 1.0;
  if (config.alpha != 4) {
    const auto lam = task_damping(decomp, config);
    double d_norm = 0.0;
    for (int a = 0; a < l; ++a) {
      double block;
      if (lam[a].infinite) {
        block = 0.0;
      } else if (lam[a].value > 0.0) {
        block = 1.0 / lam[a].value;
      } else if (config.alpha == 2) {
        // Undamped H block would need J_a; not assembled here.
        block = inf;
      } else {
        // Undamped: ||(C_aa C_aa^T)^+|| = 1/sigma_r^2.
        const double m1 = pinv_norm_bound(decomp.C_diag_block(a), 0.0, 0.0).m1;
        block = m1 * m1;
      }
      d_norm = std::max(d_norm, block);
    }
    if (config.alpha == 2 || config.alpha == 3) {
      bl = d_norm;
    } else {
      double cdstar = 0.0;
      for (int a = 0; a < l; ++a) {
        const NormBoundPair nb = pinv_norm_bound(decomp.C_diag_block(a), config.damping.mu[a],
                                                 static_cast<double>(config.damping.nu));
        cdstar = std::max(cdstar, std::min(nb.m1, nb.m2));
      }
      const double cl_norm =
          decomp.C_L().size() == 0 ? 0.0 : decomp.C_L().jacobiSvd().singularValues()(0);
      const double rho = cl_norm * cdstar;
      double neumann = 0.0, pw = 1.0;
      for (int i = 0; i < l; ++i) {
        neumann += pw;
        pw *= rho;
      }
      bl = d_norm * neumann;
    }
  }

  const double bound = R_inv_norm * cd_norm * bl * r_prime_norm;
  return std::isfinite(bound) ? bound : inf;
}

}  // namespace pik
