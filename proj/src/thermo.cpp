#include "srd/thermo.hpp"

#include <cmath>
#include <stdexcept>

namespace srd {

void GasParams::validate() const {
  if (!(gamma > 1.0)) throw std::invalid_argument("GasParams: gamma must exceed 1");
  if (!(rho0 > 0.0)) throw std::invalid_argument("GasParams: rho0 must be positive");
  if (!(p0 > 0.0)) throw std::invalid_argument("GasParams: p0 must be positive");
}

double sonic_speed_euler(const GasParams& gas, double p, double rho) {
  if (!(p > 0.0) || !(rho > 0.0)) throw std::domain_error("sonic_speed_euler: p and rho must be positive");
  return std::sqrt(gas.gamma * p / rho);
}

double sonic_speed_selfsim(double grad_phi_sq, double phi, const GasParams& gas) {
  return std::pow(gas.rho0, gas.gamma - 1.0) - (gas.gamma - 1.0) * (phi + 0.5 * grad_phi_sq);
}

double bernoulli_density(double grad_phi_sq, double phi, const GasParams& gas) {
  const double base = sonic_speed_selfsim(grad_phi_sq, phi, gas);
  if (base < 0.0) throw CavitationError("bernoulli_density: negative base (cavitation)");
  return std::pow(base, 1.0 / (gas.gamma - 1.0));
}

double critical_speed(double phi, const GasParams& gas) {
  const double rad = std::pow(gas.rho0, gas.gamma - 1.0) - (gas.gamma - 1.0) * phi;
  if (rad < 0.0) throw std::domain_error("critical_speed: negative radicand");
  return std::sqrt(2.0 / (gas.gamma + 1.0) * rad);
}

double ellipticity_margin(const Vec2& grad_phi, double phi, const GasParams& gas) {
  return critical_speed(phi, gas) - std::hypot(grad_phi[0], grad_phi[1]);
}

}  // namespace srd
