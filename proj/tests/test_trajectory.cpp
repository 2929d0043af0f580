#include "pik/trajectory.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <limits>

#include "pik/activation.hpp"
#include "pik/spline.hpp"
#include "pik/two_link.hpp"

using namespace pik;
using Catch::Approx;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

const TwoLinkParams kArm;

TrackingSystem reach(const Vec& target, std::vector<double> gains,
                     std::function<Vec(double, const Vec&)> psi = identity_activation(2)) {
  return two_link_tracking(kArm, constant_target(target), std::move(gains), std::move(psi));
}

SolverConfig damped(int alpha, double mu) {
  SolverConfig c;
  c.alpha = alpha;
  c.damping.mu = {mu, mu};
  return c;
}

IntegratorConfig rk4(double step, double t_end) {
  IntegratorConfig ic;
  ic.step = step;
  ic.t_end = t_end;
  return ic;
}

// Identity plant f(q) = q as a tracking problem; its C is the identity, so
// the error dynamics block-diagonalize exactly.
TrackingSystem identity_tracking(const Vec& target, std::vector<double> gains) {
  TrackingSystem ts;
  ts.task_dims = {1, 1};
  ts.n = 2;
  ts.f_eval = [](double, const Vec& q) {
    TrackingValue v;
    v.f = q;
    v.Df = Mat::Zero(2, 3);
    v.Df.rightCols(2) = Mat::Identity(2, 2);
    return v;
  };
  ts.p_eval = constant_target(target);
  ts.gains = std::move(gains);
  return ts;
}

}  // namespace

TEST_CASE("zero reference keeps the state put", "[trajectory]") {
  const Vec q0 = vec2(0.3, 0.7);
  const Vec f0 = two_link_fk(kArm, 0.0, q0).f;
  const TrackingSystem ts = reach(f0, {2.0, 2.0});
  const TrajectoryRecord rec = integrate(ts, SolverConfig{}, rk4(1e-2, 1.0), 0.0, q0);

  REQUIRE(rec.completed);
  REQUIRE(rec.termination == "t_end");
  for (size_t k = 0; k < rec.steps(); ++k) {
    REQUIRE(rec.states[k] == q0);  // bitwise: the velocity is exactly zero
    REQUIRE(rec.velocities[k].norm() == 0.0);
    REQUIRE(rec.errors[k].norm() == 0.0);
  }

  SECTION("convergence report sees a converged, flat run") {
    const ConvergenceReport rep = convergence_report(rec);
    REQUIRE(rep.all_error_converged);
    REQUIRE(rep.all_integral_bounded);
    REQUIRE(rep.int_u_norm == 0.0);
    for (const TaskConvergence& tc : rep.tasks) {
      REQUIRE(tc.int_phi == 0.0);
      REQUIRE(tc.int_eta_sq == 0.0);
      REQUIRE(tc.inf_sigma_psiC > 0.0);
    }
  }

  SECTION("phi-plus convention: rho and gamma vanish at zero error") {
    for (size_t k = 0; k < rec.steps(); ++k) {
      REQUIRE(rec.rho[k].norm() == 0.0);
      REQUIRE(rec.gamma[k].norm() == 0.0);
    }
  }
}

TEST_CASE("interior reach converges and stays regular", "[trajectory]") {
  const Vec q0 = vec2(0.3, 0.7);
  const Vec target = two_link_fk(kArm, 0.0, vec2(0.9, 1.3)).f;
  const TrackingSystem ts = reach(target, {8.0, 8.0});
  const TrajectoryRecord rec = integrate(ts, SolverConfig{}, rk4(1e-3, 10.0), 0.0, q0);

  REQUIRE(rec.completed);
  double min_c11 = 1e300;
  for (const Vec& d : rec.diag_c) min_c11 = std::min(min_c11, d(0));
  REQUIRE(min_c11 > 0.0);
  REQUIRE(rec.errors.back().norm() < 1e-6);

  const ConvergenceReport rep = convergence_report(rec);
  REQUIRE(rep.all_error_converged);
  REQUIRE(rep.all_integral_bounded);
}

TEST_CASE("recorded diagnostics recompute from the state", "[trajectory][property]") {
  const Vec q0 = vec2(0.3, 0.7);
  const Vec target = vec2(1.2, 0.9);
  const TrackingSystem ts = reach(target, {4.0, 4.0});
  const SolverConfig config = damped(1, 0.1);
  const TrajectoryRecord rec = integrate(ts, config, rk4(1e-2, 2.0), 0.0, q0);
  const KinematicSystem sys = as_kinematic(ts);

  for (size_t k = 0; k < rec.steps(); k += 7) {
    const double t = rec.times[k];
    const Vec& q = rec.states[k];
    const Vec e = ts.error(t, q);

    for (int a = 0; a < 2; ++a)
      REQUIRE(std::abs(rec.phi[k](a) - std::abs(e(a))) <= 1e-14);

    const VelocityResult vr = pik_velocity(t, q, sys, config);
    for (int a = 0; a < 2; ++a) {
      const Mat Caa = vr.decomp.C_diag_block(a);
      const Mat Laa = vr.L.block(a, a, 1, 1);
      const double eta = (Caa.transpose() * Laa * e.segment(a, 1)).norm();
      REQUIRE(std::abs(rec.eta[k](a) - eta) <= 1e-12);
    }
  }
}

TEST_CASE("fixed-step integrator converges at fourth order", "[trajectory][property]") {
  const Vec q0 = vec2(0.3, 0.7);
  const Vec target = two_link_fk(kArm, 0.0, vec2(0.5, 1.1)).f;
  const TrackingSystem ts = reach(target, {4.0, 4.0});

  auto final_state = [&](double h) {
    return integrate(ts, SolverConfig{}, rk4(h, 1.0), 0.0, q0).states.back();
  };

  const Vec ref = final_state(0.00125);
  const double e1 = (final_state(0.02) - ref).norm();
  const double e2 = (final_state(0.01) - ref).norm();

  REQUIRE(e2 < e1);
  const double order = std::log2(e1 / e2);
  REQUIRE(order >= 3.8);
}

TEST_CASE("adaptive pair agrees with the fixed-step run", "[trajectory]") {
  const Vec q0 = vec2(0.3, 0.7);
  const Vec target = two_link_fk(kArm, 0.0, vec2(0.5, 1.1)).f;
  const TrackingSystem ts = reach(target, {4.0, 4.0});

  IntegratorConfig adaptive = rk4(1e-2, 1.0);
  adaptive.method = IntegratorConfig::Method::DP54;
  adaptive.tolerance = 1e-10;

  const TrajectoryRecord a = integrate(ts, SolverConfig{}, adaptive, 0.0, q0);
  const TrajectoryRecord b = integrate(ts, SolverConfig{}, rk4(1e-3, 1.0), 0.0, q0);
  REQUIRE(a.completed);
  REQUIRE((a.states.back() - b.states.back()).norm() <= 1e-6);
  for (size_t k = 1; k < a.steps(); ++k) REQUIRE(a.times[k] > a.times[k - 1]);
}

TEST_CASE("velocity stays under the assembled norm bound", "[trajectory][property]") {
  const Vec q0 = vec2(0.3, 0.7);
  const TrackingSystem ts = reach(vec2(3.0, 0.0), {8.0, 8.0});  // beyond reach
  const KinematicSystem sys = as_kinematic(ts);

  for (int alpha : {1, 2, 3}) {
    const SolverConfig config = damped(alpha, 0.05);
    const TrajectoryRecord rec = integrate(ts, config, rk4(1e-3, 2.0), 0.0, q0);
    REQUIRE(rec.completed);
    for (size_t k = 0; k < rec.steps(); k += 13) {
      const VelocityResult vr = pik_velocity(rec.times[k], rec.states[k], sys, config);
      const double bound = velocity_norm_bound(vr.decomp, config, 1.0, vr.r_prime.norm());
      REQUIRE(rec.velocities[k].norm() <= bound + 1e-12);
    }
  }
}

TEST_CASE("error_dynamics_terms on a block-diagonal problem", "[trajectory]") {
  const TrackingSystem ts = identity_tracking(vec2(0.4, -0.3), {1.0, 1.0});
  const KinematicSystem sys = as_kinematic(ts);
  const SolverConfig config = damped(3, 0.5);
  const Vec q = vec2(0.1, 0.2);

  const VelocityResult vr = pik_velocity(0.0, q, sys, config);
  const ErrorDynamicsTerms terms = error_dynamics_terms(0.0, q, vr.decomp, vr.L, ts);

  SECTION("off-diagonal coupling vanishes") {
    REQUIRE(terms.A[1][0].norm() == 0.0);
  }
  SECTION("diagonal blocks are C_aa C_aa^T L_aa") {
    // c_aa = 1, lambda^2 = mu^2 = 0.25, so A_aa = 1/(1 + 0.25).
    REQUIRE(terms.A[0][0](0, 0) == Approx(0.8).margin(1e-12));
    REQUIRE(terms.A[1][1](0, 0) == Approx(0.8).margin(1e-12));
  }
  SECTION("constant target and time-invariant map leave no forcing") {
    REQUIRE(terms.b[0].norm() == 0.0);
    REQUIRE(terms.b[1].norm() == 0.0);
  }
}

TEST_CASE("error_dynamics_terms along a two-link run", "[trajectory]") {
  const Vec q0 = vec2(0.3, 0.7);
  const TrackingSystem ts = reach(vec2(1.2, 0.9), {4.0, 4.0});
  const KinematicSystem sys = as_kinematic(ts);
  const SolverConfig config = damped(1, 0.1);

  const Vec q = integrate(ts, config, rk4(1e-3, 0.5), 0.0, q0).states.back();
  const VelocityResult vr = pik_velocity(0.5, q, sys, config);
  const ErrorDynamicsTerms terms = error_dynamics_terms(0.5, q, vr.decomp, vr.L, ts);

  // Scalar first task: A_11 = c_11^2 l_11.
  const double c11 = vr.decomp.C_e(0, 0);
  REQUIRE(terms.A[0][0](0, 0) == Approx(c11 * c11 * vr.L(0, 0)).margin(1e-13));
}

TEST_CASE("error dynamics residual shrinks with the step", "[trajectory]") {
  const Vec q0 = vec2(0.3, 0.7);
  const Vec target = two_link_fk(kArm, 0.0, vec2(0.9, 1.3)).f;
  const TrackingSystem ts = reach(target, {2.0, 2.0});

  SECTION("too-short records are rejected") {
    const TrajectoryRecord rec = integrate(ts, SolverConfig{}, rk4(1e-3, 1e-3), 0.0, q0);
    REQUIRE(rec.steps() == 2);
    REQUIRE_THROWS_AS(error_dynamics_residual(rec, ts, SolverConfig{}), std::domain_error);
  }

  SECTION("interior run meets the fixed gates") {
    const TrajectoryRecord r1 = integrate(ts, SolverConfig{}, rk4(1e-3, 1.0), 0.0, q0);
    const ResidualReport rep1 = error_dynamics_residual(r1, ts, SolverConfig{});
    REQUIRE(rep1.excluded.empty());
    REQUIRE(rep1.max_residual.maxCoeff() <= 1e-4);

    const TrajectoryRecord r2 = integrate(ts, SolverConfig{}, rk4(5e-4, 1.0), 0.0, q0);
    const ResidualReport rep2 = error_dynamics_residual(r2, ts, SolverConfig{});
    REQUIRE(rep2.max_residual.maxCoeff() <= 2.5e-5);
  }

  SECTION("zero-reference run has zero residual") {
    const Vec f0 = two_link_fk(kArm, 0.0, q0).f;
    const TrackingSystem still = reach(f0, {2.0, 2.0});
    const TrajectoryRecord rec = integrate(still, SolverConfig{}, rk4(1e-2, 0.5), 0.0, q0);
    const ResidualReport rep = error_dynamics_residual(rec, still, SolverConfig{});
    REQUIRE(rep.max_residual.maxCoeff() <= 1e-15);
  }
}

TEST_CASE("near-singular passage is flagged and excluded", "[trajectory]") {
  // The elbow unfolds through q2 = pi while tracking a target on the other
  // branch; c_22 dips toward zero mid-run.
  const Vec q0 = vec2(0.5, 3.6);
  const Vec target = two_link_fk(kArm, 0.0, vec2(0.5, 2.0)).f;
  const TrackingSystem ts = reach(target, {6.0, 6.0});
  const SolverConfig config = damped(1, 0.02);

  const TrajectoryRecord rec = integrate(ts, config, rk4(1e-3, 6.0), 0.0, q0);
  REQUIRE(rec.completed);

  double min_c22 = 1e300;
  for (const Vec& d : rec.diag_c) min_c22 = std::min(min_c22, d(1));
  REQUIRE(min_c22 < 0.02);

  const ResidualReport rep = error_dynamics_residual(rec, ts, config, 0.05);
  REQUIRE_FALSE(rep.excluded.empty());

  double worst_excluded = 0.0;
  for (size_t idx : rep.excluded) {
    // per_node is indexed by interior node k-1
    for (int a = 0; a < 2; ++a)
      worst_excluded = std::max(worst_excluded, rep.per_node[a][idx - 1]);
  }
  REQUIRE(worst_excluded > rep.max_residual.maxCoeff());
  REQUIRE(rep.max_residual.maxCoeff() <= 1e-3);
}

TEST_CASE("singularity guard shortens steps near det_C = 0", "[trajectory]") {
  const Vec q0 = vec2(0.3, 0.7);
  const TrackingSystem ts = reach(vec2(3.0, 0.0), {8.0, 8.0});
  const SolverConfig config = damped(1, 0.02);

  IntegratorConfig icfg = rk4(1e-3, 2.0);
  icfg.singularity_guard = true;
  icfg.guard_det_tol = 0.02;
  icfg.min_step = 2e-4;  // the stretched pose never leaves the band

  const TrajectoryRecord rec = integrate(ts, config, icfg, 0.0, q0);
  REQUIRE(rec.completed);
  REQUIRE_FALSE(rec.guard_events.empty());

  double min_dt = 1e300;
  for (size_t k = 1; k < rec.steps(); ++k) {
    const double dt = rec.times[k] - rec.times[k - 1];
    REQUIRE(dt > 0.0);
    min_dt = std::min(min_dt, dt);
  }
  REQUIRE(min_dt < 1e-3);
  REQUIRE(min_dt >= icfg.min_step * (1.0 - 1e-9));
}

TEST_CASE("evaluator failure terminates the record cleanly", "[trajectory]") {
  TrackingSystem ts = reach(vec2(1.2, 0.9), {4.0, 4.0});
  ts.psi_eval = [](double t, const Vec&) {
    Vec psi = Vec::Ones(2);
    if (t > 0.5) psi(0) = std::numeric_limits<double>::quiet_NaN();
    return psi;
  };
  const TrajectoryRecord rec = integrate(ts, SolverConfig{}, rk4(1e-2, 2.0), 0.0, vec2(0.3, 0.7));
  REQUIRE_FALSE(rec.completed);
  REQUIRE(rec.termination.find("failure") != std::string::npos);
  REQUIRE(rec.steps() > 0);
  REQUIRE(rec.times.back() < 2.0);
}
