#pragma once

#include "srd/local_states.hpp"

namespace srd {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WedgeGeometry {
  double theta_w = 0;
  double xi0 = 0;
  Vec2 p0{0, 0}, p1{0, 0}, p2{0, 0}, p3{0, 0}, p4{0, 0};
  Vec2 sonic_center{0, 0};
  double c2 = 0;
  Vec2 s1_down{0, 0};  // unit direction of S1 from P0 towards P1
  Vec2 e_w{0, 0};      // unit direction of the wedge

  // Signed distance of p from S1; positive on the state-(2) side.
  double s1_side(const PotentialIncident& pot, const StateTwo& s2, const Vec2& p) const;
};

// (xi, eta) <-> (r, theta) about the sonic center <-> (x, y) = (c2 - r, theta - theta_w).
struct NearSonicCoords {
  Vec2 center{0, 0};
  double c2 = 0;
  double theta_w = 0;

  Vec2 to_xy(const Vec2& p) const;
  Vec2 from_xy(const Vec2& q) const;
  // Unit radial direction at p (away from the center).
  Vec2 e_r(const Vec2& p) const;
};

WedgeGeometry build_geometry(const PotentialIncident& pot, const StateTwo& s2);
NearSonicCoords near_sonic_coords(const WedgeGeometry& g);

}  // namespace srd
