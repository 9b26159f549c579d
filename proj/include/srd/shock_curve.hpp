#pragma once

#include <vector>

#include "srd/thermo.hpp"

namespace srd {

// Free boundary as a graph xi = f(eta), eta in [0, eta(P1)], stored as a clamped
// cubic spline: f'(0) = 0 (orthogonal to the symmetry line) and f'(eta(P1))
// equal to the slope of S1 (C^1 continuation of the straight segment).
class ShockCurve {
 public:
  ShockCurve() = default;
  ShockCurve(std::vector<double> eta, std::vector<double> xi, double slope_top);

  double xi(double eta) const;
  double dxi(double eta) const;
  Vec2 point(double eta) const { return {xi(eta), eta}; }
  double eta_top() const { return eta_.back(); }
  double slope_top() const { return slope_top_; }
  const std::vector<double>& knot_eta() const { return eta_; }
  const std::vector<double>& knot_xi() const { return xi_; }

 private:
  std::size_t interval(double eta) const;

  std::vector<double> eta_, xi_, m_;  // m_: second derivatives at knots
  double slope_top_ = 0;
};

}  // namespace srd
