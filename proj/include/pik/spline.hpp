#pragma once

#include <vector>

#include "pik/system.hpp"

namespace pik {

struct Waypoint {
  double t;
  Vec p;
};

/// Desired trajectory through waypoints with cubic ease-in/ease-out segments
/// (smoothstep blend), so p_dot vanishes at every waypoint, stays bounded,
/// and its total variation is the sum of waypoint gaps. Constant before the
/// first and after the last waypoint.
class WaypointPath {
 public:
  explicit WaypointPath(std::vector<Waypoint> pts);

  TargetValue operator()(double t) const;
  int dim() const { return static_cast<int>(pts_.front().p.size()); }

 private:
  std::vector<Waypoint> pts_;
};

/// Constant target: p(t) = p0, p_dot = 0 (the reaching setup).
std::function<TargetValue(double)> constant_target(const Vec& p0);

}  // namespace pik
