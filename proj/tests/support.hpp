#pragma once

#include <cmath>

#include "srd/free_boundary.hpp"

namespace srd::testing {

inline FlowContext context(double theta_w_deg, double rho1 = 2.0) {
  const auto pot = potential_incident(GasParams{}, rho1);
  return make_context(pot, theta_w_deg == 90.0 ? normal_state_two(pot) : state_two_a(pot, theta_w_deg * kPi / 180));
}

// Smooth radial test field psi = a s^2 + b s^3, s = c2^2 - |p - C|^2: vanishes
// to second order on the sonic arc and satisfies the wedge condition exactly
// (the sonic center lies on the wedge line).
struct RadialSolution {
  FlowContext ctx;
  CutoffConfig cfg;
  double a = 0.02, b = -0.005;

  double s(const Vec2& p) const {
    const double dx = p[0] - ctx.s2.u2, dy = p[1] - ctx.s2.v2;
    return ctx.s2.c2 * ctx.s2.c2 - dx * dx - dy * dy;
  }
  double value(const Vec2& p) const {
    const double t = s(p);
    return a * t * t + b * t * t * t;
  }
  Manufactured manufactured() const {
    Manufactured m;
    m.value = [this](const Vec2& p) { return value(p); };
    m.source = [this](const Vec2& p, double) {
      const double t = s(p), F1 = 2 * a * t + 3 * b * t * t, F2 = 2 * a + 6 * b * t;
      const Vec2 gs{-2 * (p[0] - ctx.s2.u2), -2 * (p[1] - ctx.s2.v2)};
      double H[2][2];
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) H[i][j] = F2 * gs[i] * gs[j] - 2 * F1 * (i == j);
      const auto co = coefficients(ctx, cfg, p, value(p), {F1 * gs[0], F1 * gs[1]});
      double r = 0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r += co.A[i][j] * H[i][j];
      return r;
    };
    return m;
  }
};

inline Grid2D grid(const FlowContext& ctx, int n, double grading = 2.0) {
  return build_grid(ctx.geo, initial_shock(ctx.geo), GridConfig{n, n, grading});
}

}  // namespace srd::testing
