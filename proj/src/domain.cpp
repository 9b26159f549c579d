#include "srd/domain.hpp"

#include <cmath>
#include <limits>

namespace srd {

double WedgeGeometry::s1_side(const PotentialIncident& pot, const StateTwo& s2, const Vec2& p) const {
  // phi1 - phi2 grows towards state (2); normalized by |grad(phi1 - phi2)|
  const auto a = phi1(pot, p), b = phi2(pot, s2, p);
  return (a.phi - b.phi) / std::hypot(pot.u1 - s2.u2, s2.v2);
}

Vec2 NearSonicCoords::to_xy(const Vec2& p) const {
  const double dx = p[0] - center[0], dy = p[1] - center[1];
  const double r = std::hypot(dx, dy);
  if (r == 0.0) throw GeometryError("to_xy: point at the sonic center");
  // y in (-pi/2, 3pi/2] so that the wedge side beyond the center maps to y = pi
  double y = std::atan2(dy, dx) - theta_w;
  while (y <= -0.5 * kPi) y += 2 * kPi;
  while (y > 1.5 * kPi) y -= 2 * kPi;
  return {c2 - r, y};
}

Vec2 NearSonicCoords::from_xy(const Vec2& q) const {
  const double r = c2 - q[0], t = q[1] + theta_w;
  if (!(r > 0.0)) throw GeometryError("from_xy: r = c2 - x must be positive");
  return {center[0] + r * std::cos(t), center[1] + r * std::sin(t)};
}

Vec2 NearSonicCoords::e_r(const Vec2& p) const {
  const double dx = p[0] - center[0], dy = p[1] - center[1];
  const double r = std::hypot(dx, dy);
  if (r == 0.0) throw GeometryError("e_r: point at the sonic center");
  return {dx / r, dy / r};
}

WedgeGeometry build_geometry(const PotentialIncident& pot, const StateTwo& s2) {
  WedgeGeometry g;
  g.theta_w = s2.theta_w;
  g.xi0 = pot.xi0;
  g.c2 = s2.c2;
  g.sonic_center = {s2.u2, s2.v2};
  g.e_w = {std::cos(s2.theta_w), std::sin(s2.theta_w)};
  g.p3 = {0.0, 0.0};
  g.p4 = {g.sonic_center[0] + g.c2 * g.e_w[0], g.sonic_center[1] + g.c2 * g.e_w[1]};
  if (s2.u2 == 0.0) {
    // normal reflection: S1 = {xi = xi1}, sonic circle centred at the origin
    g.e_w = {0.0, 1.0};
    g.p4 = {0.0, g.c2};
    const double xi1 = normal_xi1(pot, s2);
    if (!(std::abs(xi1) < g.c2)) throw GeometryError("build_geometry: reflected shock misses the sonic circle");
    g.p0 = {pot.xi0, std::numeric_limits<double>::infinity()};
    g.p1 = {xi1, std::sqrt(g.c2 * g.c2 - xi1 * xi1)};
    g.p2 = {xi1, 0.0};
    g.s1_down = {0.0, -1.0};
    return g;
  }
  g.p0 = s2.p0;
  // S1 direction: normal is (u1 - u2, -v2); pick the tangent pointing down
  Vec2 t{-s2.v2, -(pot.u1 - s2.u2)};
  const double tn = std::hypot(t[0], t[1]);
  t = {t[0] / tn, t[1] / tn};
  if (t[1] > 0) t = {-t[0], -t[1]};
  g.s1_down = t;
  const Vec2 d{g.p0[0] - g.sonic_center[0], g.p0[1] - g.sonic_center[1]};
  const double b = d[0] * t[0] + d[1] * t[1];
  const double cc = d[0] * d[0] + d[1] * d[1] - g.c2 * g.c2;
  const double disc = b * b - cc;
  if (!(disc > 0.0)) throw GeometryError("build_geometry: S1 misses the sonic circle");
  const double s = -b - std::sqrt(disc);
  if (!(s > 0.0)) throw GeometryError("build_geometry: P0 lies inside the sonic circle (state (2) subsonic at P0)");
  g.p1 = {g.p0[0] + s * t[0], g.p0[1] + s * t[1]};
  if (!(g.p1[1] > 0.0)) throw GeometryError("build_geometry: S1 meets the sonic circle outside the half-plane");
  // P1 must lie counter-clockwise from P4 on the sonic circle
  const double ang = std::atan2(g.p1[1] - g.sonic_center[1], g.p1[0] - g.sonic_center[0]) - g.theta_w;
  if (!(std::remainder(ang, 2 * kPi) > 0.0)) throw GeometryError("build_geometry: P1 not between P0 and the wedge");
  // initial P2: foot of the circle tangent to S1 at P1 and orthogonal to {eta = 0}
  const Vec2 nrm{t[1], -t[0]};
  const double a = -g.p1[1] / nrm[1];
  const Vec2 cen{g.p1[0] + a * nrm[0], 0.0};
  const double R = std::abs(a);
  g.p2 = {cen[0] + (g.p1[0] > cen[0] ? R : -R), 0.0};
  return g;
}

NearSonicCoords near_sonic_coords(const WedgeGeometry& g) {
  NearSonicCoords c;
  c.center = g.sonic_center;
  c.c2 = g.c2;
  c.theta_w = g.theta_w;
  return c;
}

}  // namespace srd
