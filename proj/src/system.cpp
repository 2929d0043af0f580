#include "pik/system.hpp"

#include <numeric>

namespace pik {

namespace {
int dims_sum(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), 0);
}

void check_dims(const std::vector<int>& task_dims, int n) {
  if (task_dims.size() < 2) throw std::domain_error("system: needs at least two tasks");
  for (int d : task_dims)
    if (d <= 0) throw std::domain_error("system: task dims must be positive");
  if (dims_sum(task_dims) > n)
    throw std::domain_error("system: total task dimension exceeds joint dimension");
  if (n <= 0) throw std::domain_error("system: joint dimension must be positive");
}
}  // namespace

int KinematicSystem::m() const { return dims_sum(task_dims); }

void KinematicSystem::validate() const {
  check_dims(task_dims, n);
  if (!F_eval || !R_eval || !r_eval) throw std::domain_error("system: evaluator missing");
}

std::function<Mat(double, const Vec&)> identity_R(int n) {
  return [n](double, const Vec&) { return Mat::Identity(n, n); };
}

int TrackingSystem::m() const { return dims_sum(task_dims); }

void TrackingSystem::validate() const {
  check_dims(task_dims, n);
  if (!f_eval || !p_eval) throw std::domain_error("tracking: evaluator missing");
  if (static_cast<int>(gains.size()) != tasks())
    throw std::domain_error("tracking: one gain per task required");
  for (double k : gains)
    if (!(k > 0.0)) throw std::domain_error("tracking: gains must be positive");
}

Vec TrackingSystem::error(double t, const Vec& q) const {
  return p_eval(t).p - f_eval(t, q).f;
}

KinematicSystem as_kinematic(const TrackingSystem& ts) {
  ts.validate();
  KinematicSystem s;
  s.task_dims = ts.task_dims;
  s.n = ts.n;
  s.F_eval = [f = ts.f_eval](double t, const Vec& q) {
    TrackingValue v = f(t, q);
    return FValue{v.Df.col(0), v.Df.rightCols(v.Df.cols() - 1)};
  };
  s.R_eval = ts.R_eval ? ts.R_eval : identity_R(ts.n);
  const int l = ts.tasks();
  std::vector<int> offs(l + 1, 0);
  for (int a = 0; a < l; ++a) offs[a + 1] = offs[a] + ts.task_dims[a];
  s.r_eval = [ts, offs, l](double t, const Vec& q) {
    const TargetValue tv = ts.p_eval(t);
    const Vec f = ts.f_eval(t, q).f;
    Vec psi = ts.psi_eval ? ts.psi_eval(t, q) : Vec::Ones(l);
    Vec r(f.size());
    for (int a = 0; a < l; ++a) {
      const auto seg = Eigen::seqN(offs[a], offs[a + 1] - offs[a]);
      r(seg) = psi(a) * (tv.p_dot(seg) + ts.gains[a] * (tv.p(seg) - f(seg)));
    }
    return r;
  };
  return s;
}

KinematicSystem pad_virtual_joints(const std::vector<int>& task_dims, int n,
                                   std::function<FValue(double, const Vec&)> F_eval,
                                   std::function<Mat(double, const Vec&)> R_eval,
                                   std::function<Vec(double, const Vec&)> r_eval) {
  const int m = dims_sum(task_dims);
  if (m <= n) throw std::domain_error("pad_virtual_joints: system already has m <= n");
  const int n_pad = m;

  KinematicSystem s;
  s.task_dims = task_dims;
  s.n = n_pad;
  s.F_eval = [F_eval, n, n_pad, m](double t, const Vec& q) {
    FValue v = F_eval(t, q.head(n));
    FValue out;
    out.f_t = v.f_t;
    out.F_q = Mat::Zero(m, n_pad);
    out.F_q.leftCols(n) = v.F_q;
    return out;
  };
  auto base_R = R_eval ? R_eval : identity_R(n);
  s.R_eval = [base_R, n, n_pad](double t, const Vec& q) {
    Mat R = Mat::Identity(n_pad, n_pad);
    R.topLeftCorner(n, n) = base_R(t, q.head(n));
    return R;
  };
  s.r_eval = [r_eval, n](double t, const Vec& q) { return r_eval(t, q.head(n)); };
  return s;
}

void SolverConfig::validate(int tasks) const {
  if (alpha < 1 || alpha > 4) throw std::domain_error("solver: alpha must be in 1..4");
  if (alpha != 4) {
    if (static_cast<int>(damping.mu.size()) != tasks)
      throw std::domain_error("solver: one mu per task required");
    for (double mu : damping.mu)
      if (mu < 0.0) throw std::domain_error("solver: mu must be nonnegative");
    if (damping.nu < 0) throw std::domain_error("solver: nu must be nonnegative");
  }
  if (zero_tol < 0.0 || rank_tol < 0.0)
    throw std::domain_error("solver: tolerances must be nonnegative");
}

}  // namespace pik
