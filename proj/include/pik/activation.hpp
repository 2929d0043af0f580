#pragma once

#include <functional>
#include <string>

#include "pik/types.hpp"

namespace pik {

/// Parameters of the smooth activation pair (psi_1, psi_2) for the planar
/// two-link arm. r2 is the pinch radius around the singular lattice; floor is
/// the activation level guaranteed at reference interior points.
struct ActivationSpec {
  double r2 = 0.5;
  double floor = 0.05;
  std::string smoothness = "C-infinity";

  void validate() const;
};

/// Builds the per-task activation evaluator (t, q) -> (psi_1, psi_2).
///
/// psi_2(q) = 1 - exp(-w2(q) / r2) with w2 = sin^2(q1) + 1 + cos(q2): smooth,
/// 2pi-periodic, zero exactly on the lower singular lattice (q1 in pi Z,
/// q2 odd multiple of pi), and since w2(q') <= ||q' - q||^2 for every lattice
/// point q, psi_2(q') <= ||q' - q|| whenever ||q' - q|| <= r2.
///
/// psi_1 is identically one for the damped families; for alpha = 4 it takes
/// the same shape with w1 = sin^2(q1) + 1 - cos(q2), vanishing on the upper
/// lattice (q2 even multiple of pi) with the same pinch.
std::function<Vec(double, const Vec&)> build_activation(const ActivationSpec& spec, int alpha);

/// All activations identically one.
std::function<Vec(double, const Vec&)> identity_activation(int tasks);

}  // namespace pik
