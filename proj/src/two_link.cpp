#include "pik/two_link.hpp"

#include <cmath>

namespace pik {

namespace {
constexpr double kLatticeTol = 1e-13;

double axis_lattice_dist(double x, double period) {
  return std::abs(x - period * std::round(x / period));
}

PriorityDecomposition make_decomp(double c11, double c21, double c22, const Vec& j1_hat,
                                  const Vec& j2_hat) {
  PriorityDecomposition d;
  d.task_dims = {1, 1};
  d.offsets = {0, 1, 2};
  d.zero_tol_used = kLatticeTol;
  d.C_e = Mat::Zero(2, 2);
  d.C_e(0, 0) = c11;
  d.C_e(1, 0) = c21;
  d.C_e(1, 1) = c22;
  d.J_hat_e = Mat::Zero(2, 2);
  d.J_hat_e.row(0) = j1_hat.transpose();
  d.J_hat_e.row(1) = j2_hat.transpose();
  return d;
}

Vec perp(const Vec& v) {
  Vec w(2);
  w << -v(1), v(0);
  return w;
}
}  // namespace

void TwoLinkParams::validate() const {
  if (!(L1 > 0.0) || !(L2 > 0.0))
    throw std::domain_error("two-link: link lengths must be positive");
}

FkResult two_link_fk(const TwoLinkParams& params, double t, const Vec& q) {
  (void)t;
  params.validate();
  if (q.size() != 2) throw std::domain_error("two-link: q must have dimension 2");
  const double s1 = std::sin(q(0)), c1 = std::cos(q(0));
  const double s12 = std::sin(q(0) + q(1)), c12 = std::cos(q(0) + q(1));
  FkResult out;
  out.f = Vec(2);
  out.f << params.L1 * c1 + params.L2 * c12, params.L1 * s1 + params.L2 * s12;
  out.J = Mat(2, 2);
  out.J << -params.L1 * s1 - params.L2 * s12, -params.L2 * s12,
           params.L1 * c1 + params.L2 * c12, params.L2 * c12;
  return out;
}

PriorityDecomposition two_link_analytic_qr(const TwoLinkParams& params, double t, const Vec& q) {
  const FkResult fk = two_link_fk(params, t, q);
  const Vec j1 = fk.J.row(0).transpose();
  const Vec j2 = fk.J.row(1).transpose();

  const bool q1_lattice = std::abs(std::sin(q(0))) < kLatticeTol;
  const bool q2_lattice = std::abs(std::sin(q(1))) < kLatticeTol;

  if (q1_lattice && q2_lattice) {
    // j1 = 0: first task fully singular, j2 never vanishes (L2 > 0).
    const double c22 = j2.norm();
    const Vec j2_hat = j2 / c22;
    return make_decomp(0.0, 0.0, c22, perp(j2_hat), j2_hat);
  }

  const double c11 = j1.norm();
  const Vec j1_hat = j1 / c11;
  const double c21 = j2.dot(j1_hat);

  if (q2_lattice) {
    // Rows parallel: second task is fully shadowed by the first.
    return make_decomp(c11, c21, 0.0, j1_hat, perp(j1_hat));
  }

  const Vec w = j2 - c21 * j1_hat;  // j2 (I - j1^T j1 / j1 j1^T)
  const double c22 = w.norm();
  return make_decomp(c11, c21, c22, j1_hat, w / c22);
}

double lattice_distance(const Vec& q) {
  return std::hypot(axis_lattice_dist(q(0), M_PI), axis_lattice_dist(q(1), M_PI));
}

double y1_distance(const Vec& q) {
  return std::hypot(axis_lattice_dist(q(0), M_PI), axis_lattice_dist(q(1), 2.0 * M_PI));
}

HessianResult two_link_hessian_at_singularity(const TwoLinkParams& params, const Vec& q,
                                              double snap_tol) {
  params.validate();
  if (q.size() != 2) throw std::domain_error("two-link hessian: q must have dimension 2");
  const long k1 = std::lround(q(0) / M_PI);
  const long k2 = std::lround(q(1) / M_PI);
  if (std::abs(q(0) - k1 * M_PI) > snap_tol || std::abs(q(1) - k2 * M_PI) > snap_tol)
    throw std::domain_error("two-link hessian: q is not on the singular lattice");

  const double c1 = (k1 % 2 == 0) ? 1.0 : -1.0;
  const double c12 = ((k1 + k2) % 2 == 0) ? 1.0 : -1.0;
  HessianResult out;
  out.H = Mat(2, 2);
  out.H << -params.L1 * c1 - params.L2 * c12, -params.L2 * c12,
           -params.L2 * c12, -params.L2 * c12;
  out.cls = (k2 % 2 == 0) ? LatticeClass::Y1 : LatticeClass::Y2;
  return out;
}

TrackingSystem two_link_tracking(const TwoLinkParams& params,
                                 std::function<TargetValue(double)> target,
                                 std::vector<double> gains,
                                 std::function<Vec(double, const Vec&)> psi) {
  params.validate();
  TrackingSystem ts;
  ts.task_dims = {1, 1};
  ts.n = 2;
  ts.f_eval = [params](double t, const Vec& q) {
    const FkResult fk = two_link_fk(params, t, q);
    TrackingValue v;
    v.f = fk.f;
    v.Df = Mat::Zero(2, 3);  // time-invariant: f_t = 0
    v.Df.rightCols(2) = fk.J;
    return v;
  };
  ts.p_eval = std::move(target);
  ts.gains = std::move(gains);
  ts.psi_eval = std::move(psi);
  return ts;
}

}  // namespace pik
