#include "pik/three_link.hpp"

#include <cmath>

namespace pik {

void ThreeLinkParams::validate() const {
  if (!(L1 > 0.0) || !(L2 > 0.0) || !(L3 > 0.0))
    throw std::domain_error("three-link: link lengths must be positive");
}

FkResult three_link_fk(const ThreeLinkParams& params, double t, const Vec& q) {
  (void)t;
  params.validate();
  if (q.size() != 3) throw std::domain_error("three-link: q must have dimension 3");
  const double a1 = q(0), a2 = q(0) + q(1), a3 = q(0) + q(1) + q(2);
  const double s1 = std::sin(a1), c1 = std::cos(a1);
  const double s2 = std::sin(a2), c2 = std::cos(a2);
  const double s3 = std::sin(a3), c3 = std::cos(a3);
  FkResult out;
  out.f = Vec(2);
  out.f << params.L1 * c1 + params.L2 * c2 + params.L3 * c3,
           params.L1 * s1 + params.L2 * s2 + params.L3 * s3;
  out.J = Mat(2, 3);
  out.J << -params.L1 * s1 - params.L2 * s2 - params.L3 * s3,
           -params.L2 * s2 - params.L3 * s3, -params.L3 * s3,
           params.L1 * c1 + params.L2 * c2 + params.L3 * c3,
           params.L2 * c2 + params.L3 * c3, params.L3 * c3;
  return out;
}

TrackingSystem three_link_tracking(const ThreeLinkParams& params,
                                   std::function<TargetValue(double)> target,
                                   std::vector<double> gains,
                                   std::function<Vec(double, const Vec&)> psi) {
  params.validate();
  TrackingSystem ts;
  ts.task_dims = {1, 1};
  ts.n = 3;
  ts.f_eval = [params](double t, const Vec& q) {
    const FkResult fk = three_link_fk(params, t, q);
    TrackingValue v;
    v.f = fk.f;
    v.Df = Mat::Zero(2, 4);
    v.Df.rightCols(3) = fk.J;
    return v;
  };
  ts.p_eval = std::move(target);
  ts.gains = std::move(gains);
  ts.psi_eval = std::move(psi);
  return ts;
}

}  // namespace pik
