#pragma once

#include "pik/two_link.hpp"

namespace pik {

/// Planar 3R arm with the same split task layout as the two-link arm:
/// task 1 tracks the horizontal tip coordinate, task 2 the vertical one.
/// The extra joint makes the arm redundant (n = 3 > m = 2), which is what
/// the semistable probe scenarios exercise.
struct ThreeLinkParams {
  double L1 = 1.0;
  double L2 = 1.0;
  double L3 = 1.0;

  double reach() const { return L1 + L2 + L3; }
  void validate() const;
};

FkResult three_link_fk(const ThreeLinkParams& params, double t, const Vec& q);

TrackingSystem three_link_tracking(const ThreeLinkParams& params,
                                   std::function<TargetValue(double)> target,
                                   std::vector<double> gains,
                                   std::function<Vec(double, const Vec&)> psi);

}  // namespace pik
