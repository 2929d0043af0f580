#include "pik/trajectory.hpp"

#include <cmath>

namespace pik {

namespace {

double sigma_min(const Mat& A) {
  if (A.size() == 0) return 0.0;
  const Vec s = A.jacobiSvd().singularValues();
  return s(s.size() - 1);
}

std::vector<int> block_offsets(const std::vector<int>& dims) {
  std::vector<int> off(dims.size() + 1, 0);
  for (size_t a = 0; a < dims.size(); ++a) off[a + 1] = off[a] + dims[a];
  return off;
}

// A_ab = sum_{i=b..a} C_ai C_ii^T L_ib needs only the decomposition and L.
std::vector<std::vector<Mat>> error_dynamics_A(const PriorityDecomposition& decomp,
                                               const Mat& L) {
  const int l = decomp.tasks();
  const auto& off = decomp.offsets;
  const auto& dims = decomp.task_dims;
  std::vector<std::vector<Mat>> A(l);
  for (int a = 0; a < l; ++a) {
    A[a].resize(a + 1);
    for (int b = 0; b <= a; ++b) {
      Mat acc = Mat::Zero(dims[a], dims[b]);
      for (int i = b; i <= a; ++i)
        acc += decomp.C_block(a, i) * decomp.C_diag_block(i).transpose() *
               L.block(off[i], off[b], dims[i], dims[b]);
      A[a][b] = acc;
    }
  }
  return A;
}

struct Context {
  const KinematicSystem& S;
  const TrackingSystem* ts;
  const SolverConfig& config;
};

void record_node(TrajectoryRecord& rec, const Context& cx, double t, const Vec& q,
                 const VelocityResult& vr) {
  const int l = rec.tasks();
  const auto& dims = rec.task_dims;
  const auto off = block_offsets(dims);
  const int m = off.back();

  Vec e = Vec::Zero(m);
  Vec psi = Vec::Ones(l);
  std::vector<std::vector<Mat>> A = error_dynamics_A(vr.decomp, vr.L);
  std::vector<Vec> bvec;
  if (cx.ts) {
    e = cx.ts->error(t, q);
    if (cx.ts->psi_eval) psi = cx.ts->psi_eval(t, q);
    ErrorDynamicsTerms terms = error_dynamics_terms(t, q, vr.decomp, vr.L, *cx.ts);
    bvec = std::move(terms.b);
  }

  Vec phi(l), eta(l), rho(l), gam(l), sA(l), sC(l);
  for (int a = 0; a < l; ++a) {
    const Vec ea = e.segment(off[a], dims[a]);
    const Mat Caa = vr.decomp.C_diag_block(a);
    const Mat Laa = vr.L.block(off[a], off[a], dims[a], dims[a]);
    phi(a) = ea.norm();
    eta(a) = (psi(a) * Caa.transpose() * Laa * ea).norm();
    const double phip = phi(a) > 0.0 ? 1.0 / phi(a) : 0.0;  // phi^+ convention
    if (cx.ts) {
      rho(a) = cx.ts->gains[a] * psi(a) * phip * phip * ea.dot(A[a][a] * ea);
      gam(a) = phip * ea.dot(bvec[a]);
    } else {
      rho(a) = 0.0;
      gam(a) = 0.0;
    }
    sA(a) = sigma_min(psi(a) * A[a][a]);
    sC(a) = sigma_min(psi(a) * Caa);
  }

  const Vec e_res = vr.r_prime - vr.J * (vr.R * vr.u);

  rec.times.push_back(t);
  rec.states.push_back(q);
  rec.velocities.push_back(vr.u);
  rec.errors.push_back(e);
  rec.residuals.push_back(e_res);
  rec.phi.push_back(phi);
  rec.eta.push_back(eta);
  rec.rho.push_back(rho);
  rec.gamma.push_back(gam);
  rec.det_C.push_back(vr.report.det_C);
  rec.diag_c.push_back(vr.report.diag_c);
  rec.sigma_min_psiA.push_back(sA);
  rec.sigma_min_psiC.push_back(sC);

  const size_t k = rec.times.size() - 1;
  if (k == 0) {
    rec.int_phi.push_back(Vec::Zero(l));
    rec.int_eta.push_back(Vec::Zero(l));
    rec.int_eta_sq.push_back(Vec::Zero(l));
    rec.int_u_norm.push_back(0.0);
  } else {
    const double dt = rec.times[k] - rec.times[k - 1];
    rec.int_phi.push_back(rec.int_phi[k - 1] +
                          0.5 * dt * (rec.phi[k - 1] + rec.phi[k]));
    rec.int_eta.push_back(rec.int_eta[k - 1] +
                          0.5 * dt * (rec.eta[k - 1] + rec.eta[k]));
    rec.int_eta_sq.push_back(
        rec.int_eta_sq[k - 1] +
        0.5 * dt * (rec.eta[k - 1].cwiseProduct(rec.eta[k - 1]) +
                    rec.eta[k].cwiseProduct(rec.eta[k])));
    rec.int_u_norm.push_back(rec.int_u_norm[k - 1] +
                             0.5 * dt *
                                 (rec.velocities[k - 1].norm() + rec.velocities[k].norm()));
  }
}

bool rk4_step(const Context& cx, double t, const Vec& q, double h, const Vec& k1, Vec& q_out,
              std::string& err) {
  try {
    const Vec k2 = pik_velocity(t + 0.5 * h, q + 0.5 * h * k1, cx.S, cx.config).u;
    const Vec k3 = pik_velocity(t + 0.5 * h, q + 0.5 * h * k2, cx.S, cx.config).u;
    const Vec k4 = pik_velocity(t + h, q + h * k3, cx.S, cx.config).u;
    q_out = q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return true;
  } catch (const std::exception& ex) {
    err = ex.what();
    return false;
  }
}

// Dormand-Prince 5(4) embedded pair.
bool dp54_step(const Context& cx, double t, const Vec& q, double h, const Vec& k1, Vec& q_out,
               double& err_norm, std::string& err) {
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                      e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
  try {
    auto u = [&](double tt, const Vec& qq) { return pik_velocity(tt, qq, cx.S, cx.config).u; };
    const Vec k2 = u(t + h / 5.0, q + h * (a21 * k1));
    const Vec k3 = u(t + 3.0 * h / 10, q + h * (a31 * k1 + a32 * k2));
    const Vec k4 = u(t + 4.0 * h / 5, q + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = u(t + 8.0 * h / 9, q + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = u(t + h, q + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    q_out = q + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = u(t + h, q_out);
    const Vec q4 = q + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    err_norm = (q_out - q4).norm();
    return true;
  } catch (const std::exception& ex) {
    err = ex.what();
    return false;
  }
}

TrajectoryRecord integrate_core(const Context& cx, const IntegratorConfig& icfg, double t0,
                                const Vec& q0) {
  icfg.validate();
  cx.S.validate();
  cx.config.validate(cx.S.tasks());
  if (q0.size() != cx.S.n || !all_finite(q0))
    throw std::domain_error("integrate: bad initial state");
  if (!(icfg.t_end > t0)) throw std::domain_error("integrate: t_end must exceed t0");

  TrajectoryRecord rec;
  rec.task_dims = cx.S.task_dims;
  rec.n = cx.S.n;

  double t = t0;
  Vec q = q0;
  double h_cur = icfg.step;
  const double t_eps = 1e-12 * std::max(1.0, std::abs(icfg.t_end));

  while (true) {
    VelocityResult vr;
    try {
      vr = pik_velocity(t, q, cx.S, cx.config);
    } catch (const std::exception& ex) {
      rec.termination = std::string("evaluation-failure: ") + ex.what();
      return rec;
    }
    if (!all_finite(vr.u)) {
      rec.termination = "non-finite-velocity";
      return rec;
    }
    record_node(rec, cx, t, q, vr);

    if (t >= icfg.t_end - t_eps) {
      rec.completed = true;
      rec.termination = "t_end";
      return rec;
    }

    if (icfg.singularity_guard) {
      if (std::abs(rec.det_C.back()) < 10.0 * icfg.guard_det_tol) {
        const double halved = std::max(0.5 * h_cur, icfg.min_step);
        if (halved < h_cur) rec.guard_events.push_back(rec.times.size() - 1);
        h_cur = halved;
      } else {
        h_cur = icfg.step;
      }
    }

    std::string err;
    Vec q_next;
    double h = std::min(h_cur, icfg.t_end - t);
    if (icfg.method == IntegratorConfig::Method::RK4) {
      if (!rk4_step(cx, t, q, h, vr.u, q_next, err)) {
        rec.termination = "stage-failure: " + err;
        return rec;
      }
    } else {
      bool accepted = false;
      while (!accepted) {
        double err_norm = 0.0;
        if (!dp54_step(cx, t, q, h, vr.u, q_next, err_norm, err)) {
          rec.termination = "stage-failure: " + err;
          return rec;
        }
        const double scale = icfg.tolerance * (1.0 + q.norm());
        if (err_norm <= scale || h <= icfg.min_step * (1.0 + 1e-12)) {
          accepted = true;
          double grow = err_norm > 0.0 ? 0.9 * std::pow(scale / err_norm, 0.2) : 5.0;
          h_cur = std::clamp(h * std::clamp(grow, 0.2, 5.0), icfg.min_step, icfg.step);
        } else {
          h = std::max(h * std::clamp(0.9 * std::pow(scale / err_norm, 0.2), 0.2, 0.9),
                       icfg.min_step);
        }
      }
    }
    if (!all_finite(q_next)) {
      rec.termination = "non-finite-state";
      return rec;
    }
    t += h;
    q = q_next;
  }
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(step > 0.0)) throw std::domain_error("integrator: step must be positive");
  if (!(min_step > 0.0) || min_step > step)
    throw std::domain_error("integrator: need 0 < min_step <= step");
  if (!(tolerance > 0.0)) throw std::domain_error("integrator: tolerance must be positive");
  if (guard_det_tol < 0.0) throw std::domain_error("integrator: guard_det_tol must be >= 0");
}

Vec TrajectoryRecord::task_segment(const Vec& stacked, int a) const {
  const auto off = block_offsets(task_dims);
  return stacked.segment(off[a], task_dims[a]);
}

TrajectoryRecord integrate(const TrackingSystem& ts, const SolverConfig& config,
                           const IntegratorConfig& icfg, double t0, const Vec& q0) {
  const KinematicSystem S = as_kinematic(ts);
  Context cx{S, &ts, config};
  return integrate_core(cx, icfg, t0, q0);
}

TrajectoryRecord integrate(const KinematicSystem& S, const SolverConfig& config,
                           const IntegratorConfig& icfg, double t0, const Vec& q0) {
  Context cx{S, nullptr, config};
  return integrate_core(cx, icfg, t0, q0);
}

ErrorDynamicsTerms error_dynamics_terms(double t, const Vec& q,
                                        const PriorityDecomposition& decomp, const Mat& L,
                                        const TrackingSystem& ts) {
  const int l = decomp.tasks();
  const auto& off = decomp.offsets;
  const auto& dims = decomp.task_dims;

  ErrorDynamicsTerms out;
  out.A = error_dynamics_A(decomp, L);

  const TrackingValue fval = ts.f_eval(t, q);
  const TargetValue tv = ts.p_eval(t);
  const Vec f_t = fval.Df.col(0);
  const Vec e = tv.p - fval.f;
  const Vec psi = ts.psi_eval ? ts.psi_eval(t, q) : Vec::Ones(l);

  out.b.resize(l);
  for (int a = 0; a < l; ++a) {
    Vec ba = tv.p_dot.segment(off[a], dims[a]) - f_t.segment(off[a], dims[a]);
    for (int b = 0; b <= a; ++b)
      ba -= out.A[a][b] *
            (psi(b) * tv.p_dot.segment(off[b], dims[b]) - f_t.segment(off[b], dims[b]));
    for (int b = 0; b < a; ++b)
      ba -= ts.gains[b] * psi(b) * (out.A[a][b] * e.segment(off[b], dims[b]));
    out.b[a] = ba;
  }
  return out;
}

ResidualReport error_dynamics_residual(const TrajectoryRecord& rec, const TrackingSystem& ts,
                                       const SolverConfig& config, double exclusion_tol) {
  if (rec.steps() < 3)
    throw std::domain_error("error_dynamics_residual: record needs at least 3 nodes");
  const int l = rec.tasks();
  const auto off = block_offsets(rec.task_dims);
  const KinematicSystem S = as_kinematic(ts);

  ResidualReport rep;
  rep.max_residual = Vec::Zero(l);
  rep.per_node.assign(l, {});

  for (size_t k = 1; k + 1 < rec.steps(); ++k) {
    const double h1 = rec.times[k] - rec.times[k - 1];
    const double h2 = rec.times[k + 1] - rec.times[k];
    const Vec edot = (h1 * h1 * rec.errors[k + 1] + (h2 * h2 - h1 * h1) * rec.errors[k] -
                      h2 * h2 * rec.errors[k - 1]) /
                     (h1 * h2 * (h1 + h2));

    const VelocityResult vr = pik_velocity(rec.times[k], rec.states[k], S, config);
    const ErrorDynamicsTerms terms =
        error_dynamics_terms(rec.times[k], rec.states[k], vr.decomp, vr.L, ts);
    const Vec psi = ts.psi_eval ? ts.psi_eval(rec.times[k], rec.states[k]) : Vec::Ones(l);

    bool excluded = false;
    for (size_t j = k - 1; j <= k + 1; ++j)
      if (rec.diag_c[j].minCoeff() < exclusion_tol) excluded = true;
    if (excluded) rep.excluded.push_back(k);

    for (int a = 0; a < l; ++a) {
      const Vec ea = rec.errors[k].segment(off[a], rec.task_dims[a]);
      const double res =
          (edot.segment(off[a], rec.task_dims[a]) + ts.gains[a] * psi(a) * (terms.A[a][a] * ea) -
           terms.b[a])
              .norm();
      rep.per_node[a].push_back(res);
      if (!excluded) rep.max_residual(a) = std::max(rep.max_residual(a), res);
    }
  }
  return rep;
}

ConvergenceReport convergence_report(const TrajectoryRecord& rec, double threshold) {
  if (rec.steps() == 0) throw std::domain_error("convergence_report: empty record");
  const int l = rec.tasks();
  const size_t last = rec.steps() - 1;

  size_t idx90 = 0;
  const double t90 = rec.times.front() + 0.9 * (rec.times[last] - rec.times.front());
  while (idx90 < last && rec.times[idx90] < t90) ++idx90;

  auto plateaued = [&](const std::vector<Vec>& integral, int a) {
    const double total = integral[last](a);
    const double increment = total - integral[idx90](a);
    return increment <= 0.01 * total;
  };

  ConvergenceReport rep;
  rep.threshold = threshold;
  rep.int_u_norm = rec.int_u_norm[last];
  rep.all_integral_bounded = true;
  rep.all_error_converged = true;
  for (int a = 0; a < l; ++a) {
    TaskConvergence tc;
    tc.int_eta_sq = rec.int_eta_sq[last](a);
    tc.int_eta = rec.int_eta[last](a);
    tc.int_phi = rec.int_phi[last](a);
    tc.final_phi = rec.phi[last](a);
    tc.inf_sigma_psiA = rec.sigma_min_psiA[0](a);
    tc.inf_sigma_psiC = rec.sigma_min_psiC[0](a);
    for (size_t k = 1; k <= last; ++k) {
      tc.inf_sigma_psiA = std::min(tc.inf_sigma_psiA, rec.sigma_min_psiA[k](a));
      tc.inf_sigma_psiC = std::min(tc.inf_sigma_psiC, rec.sigma_min_psiC[k](a));
    }
    tc.integral_bounded =
        plateaued(rec.int_eta_sq, a) && plateaued(rec.int_eta, a) && plateaued(rec.int_phi, a);
    tc.error_converged = tc.final_phi < threshold;
    rep.all_integral_bounded = rep.all_integral_bounded && tc.integral_bounded;
    rep.all_error_converged = rep.all_error_converged && tc.error_converged;
    rep.tasks.push_back(tc);
  }
  return rep;
}

}  // namespace pik
