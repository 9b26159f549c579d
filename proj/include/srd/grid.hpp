#pragma once

#include <vector>

#include "srd/domain.hpp"
#include "srd/shock_curve.hpp"

namespace srd {

struct GridConfig {
  int nx = 64, ny = 64;
  // sigma(X) = (exp(g X) - 1)/(exp(g) - 1) along the wedge, clustering columns
  // at the sonic arc; the map is fixed under refinement.
  double grading = 2.0;
};

// Discrete metric of the map (X, Y) -> (xi, eta) at a node.
struct Metric {
  double J[2][2];     // J[a][m] = d P_a / d L_m
  double Jinv[2][2];  // Jinv[m][a] = d L_m / d P_a
  double D2[2][3];    // D2[a] = (P_a,XX, P_a,XY, P_a,YY)
  double det;
};

// Logical unit square -> Omega. i = 0: sonic arc, i = nx: symmetry line,
// j = 0: wedge, j = ny: shock. Node (0, ny) is P1, (nx, 0) is P3, (nx, ny) is P2.
struct Grid2D {
  int nx = 0, ny = 0;
  double hX = 0, hY = 0;
  std::vector<Vec2> p;
  std::vector<Metric> metric;
  std::vector<double> sigma;  // wedge parameter per column

  int idx(int i, int j) const { return i * (ny + 1) + j; }
  const Vec2& at(int i, int j) const { return p[idx(i, j)]; }
  std::size_t size() const { return p.size(); }
  // One-sided-at-the-ends second-order logical derivatives of a nodal field.
  double dX(const std::vector<double>& f, int i, int j) const;
  double dY(const std::vector<double>& f, int i, int j) const;
  double dXX(const std::vector<double>& f, int i, int j) const;
  double dYY(const std::vector<double>& f, int i, int j) const;
  double dXY(const std::vector<double>& f, int i, int j) const;
  // Physical gradient and Hessian of a nodal field.
  Vec2 grad(const std::vector<double>& f, int i, int j) const;
  void hessian(const std::vector<double>& f, int i, int j, double H[2][2]) const;
  // min |det J|; the map has det J < 0 at every node by construction
  double min_jacobian() const;
};

Grid2D build_grid(const WedgeGeometry& geo, const ShockCurve& shock, const GridConfig& cfg);

}  // namespace srd
