#include "pik/activation.hpp"

#include <cmath>

namespace pik {

void ActivationSpec::validate() const {
  if (!(r2 > 0.0) || r2 > 1.0)
    throw std::domain_error("activation: r2 must be in (0, 1]");
  if (!(floor > 0.0)) throw std::domain_error("activation: floor must be positive");
}

std::function<Vec(double, const Vec&)> build_activation(const ActivationSpec& spec, int alpha) {
  spec.validate();
  if (alpha < 1 || alpha > 4) throw std::domain_error("activation: alpha must be in 1..4");
  const double r2 = spec.r2;
  const bool pinch_psi1 = (alpha == 4);
  return [r2, pinch_psi1](double, const Vec& q) {
    const double s1 = std::sin(q(0));
    const double w2 = s1 * s1 + 1.0 + std::cos(q(1));
    Vec psi(2);
    psi(1) = 1.0 - std::exp(-w2 / r2);
    if (pinch_psi1) {
      const double w1 = s1 * s1 + 1.0 - std::cos(q(1));
      psi(0) = 1.0 - std::exp(-w1 / r2);
    } else {
      psi(0) = 1.0;
    }
    return psi;
  };
}

std::function<Vec(double, const Vec&)> identity_activation(int tasks) {
  return [tasks](double, const Vec&) { return Vec::Ones(tasks); };
}

}  // namespace pik
