#include "pik/spline.hpp"

#include <algorithm>

namespace pik {

WaypointPath::WaypointPath(std::vector<Waypoint> pts) : pts_(std::move(pts)) {
  if (pts_.empty()) throw std::domain_error("waypoint path: needs at least one waypoint");
  for (size_t i = 1; i < pts_.size(); ++i) {
    if (!(pts_[i].t > pts_[i - 1].t))
      throw std::domain_error("waypoint path: times must be strictly increasing");
    if (pts_[i].p.size() != pts_[0].p.size())
      throw std::domain_error("waypoint path: inconsistent point dimensions");
  }
}

TargetValue WaypointPath::operator()(double t) const {
  const int d = dim();
  if (t <= pts_.front().t || pts_.size() == 1)
    return {pts_.front().p, Vec::Zero(d)};
  if (t >= pts_.back().t) return {pts_.back().p, Vec::Zero(d)};

  size_t i = 1;
  while (pts_[i].t < t) ++i;
  const Waypoint& a = pts_[i - 1];
  const Waypoint& b = pts_[i];
  const double dt = b.t - a.t;
  const double s = (t - a.t) / dt;
  const double blend = s * s * (3.0 - 2.0 * s);
  const double blend_dot = 6.0 * s * (1.0 - s) / dt;
  return {a.p + blend * (b.p - a.p), blend_dot * (b.p - a.p)};
}

std::function<TargetValue(double)> constant_target(const Vec& p0) {
  return [p0](double) { return TargetValue{p0, Vec::Zero(p0.size())}; };
}

}  // namespace pik
