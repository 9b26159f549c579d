#pragma once

#include <array>
#include <stdexcept>

namespace srd {

using Vec2 = std::array<double, 2>;

// Polytropic gas; the potential branch uses the normalization in which the
// state-(0) Bernoulli constant is rho0^(gamma-1)/(gamma-1).
struct GasParams {
  double gamma = 1.4;
  double rho0 = 1.0;
  double p0 = 1.0;  // Euler branch only

  void validate() const;
};

// Vacuum reached: a property of the queried state, not a programming error.
struct CavitationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double sonic_speed_euler(const GasParams& gas, double p, double rho);

// rho(|grad phi|^2, phi) = (rho0^(g-1) - (g-1)(phi + q^2/2))^(1/(g-1))
double bernoulli_density(double grad_phi_sq, double phi, const GasParams& gas);

// c^2 = rho0^(g-1) - (g-1)(phi + q^2/2); may be negative
double sonic_speed_selfsim(double grad_phi_sq, double phi, const GasParams& gas);

// c_* = sqrt(2/(g+1) (rho0^(g-1) - (g-1) phi))
double critical_speed(double phi, const GasParams& gas);

// c_*(phi) - |grad phi|; positive iff the equation is elliptic
double ellipticity_margin(const Vec2& grad_phi, double phi, const GasParams& gas);

}  // namespace srd
