#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "srd/grid.hpp"

namespace srd {

// Cutoff ("Shiffmanization") of the nonlinear coefficients.
struct CutoffConfig {
  double delta = 0.25;            // slack: |psi_x| <= (2 - delta) x/(gamma + 1) in the band
  double near_arc_width = 0.2;    // band x < near_arc_width * c2
  double global_mach_cap = 0.95;  // |grad phi| <= cap * c_* outside the band
  bool stabilize = true;          // monotone (artificial-diffusion) first-order terms
  bool smooth = true;             // C^1 saturation instead of hard limits
  double knee = 0.1;             // half-width of the C^1 knee, relative to the threshold

  void validate() const;
};

// Uniform data of the configuration.
struct FlowContext {
  PotentialIncident pot;
  StateTwo s2;
  WedgeGeometry geo;
};

FlowContext make_context(const PotentialIncident& pot, const StateTwo& s2);

// Source-term mode for verification: interior rows become A(psi):D^2 psi = source,
// the arc, shock and symmetry rows Dirichlet psi = value (wedge rows stay
// Neumann unless dirichlet_wedge is set).
struct Manufactured {
  std::function<double(const Vec2&)> value;
  std::function<double(const Vec2&, double psi)> source;
  bool dirichlet_wedge = false;
};

struct CoefficientStats {
  int interior = 0;
  int band_clamped = 0;  // psi_x limited in the near-arc band
  int floored = 0;       // radial coefficient raised to its floor
  int capped = 0;        // |grad phi| capped outside the band
  double min_coefficient = 0;  // min eigenvalue of the effective A over interior nodes
  int active() const { return band_clamped + floored + capped; }
};

struct LinearSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  CoefficientStats stats;
};

// Effective (cut-off) coefficient matrix A = c^2 I - grad phi (x) grad phi at p.
struct Coefficients {
  double A[2][2];
  bool clamped = false, floored = false, capped = false;
};
Coefficients coefficients(const FlowContext& ctx, const CutoffConfig& cfg, const Vec2& p, double psi, const Vec2& grad_psi);

// Rows: interior A:D^2 psi = 0 (frozen at psi), sonic arc psi = 0, wedge and
// symmetry grad phi . nu = 0, shock: Newton-linearized [rho grad phi . nu] = 0.
LinearSystem assemble(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi,
                      const CutoffConfig& cfg, Exec exec = Exec::parallel, const Manufactured* mms = nullptr);

// Nonlinear residual of every row at psi (A(psi) psi - b(psi), with the row scaling).
Eigen::VectorXd residual(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi,
                         const CutoffConfig& cfg, Exec exec = Exec::parallel, const Manufactured* mms = nullptr);

// Finite-difference Jacobian of residual() at psi (F = residual at psi): every
// row depends on a 3x3 logical window, so 9 coloured probes suffice.
Eigen::SparseMatrix<double> jacobian(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi,
                                     const Eigen::VectorXd& F, const CutoffConfig& cfg, Exec exec = Exec::parallel,
                                     const Manufactured* mms = nullptr);

// Shock-side residuals at the nodes j = ny, i = 1..nx (P1 excluded: pinned corner):
// phi - phi1 and the flux jump rho grad phi . nu - rho1 grad phi1 . nu with
// one-sided gradients from Omega.
struct ShockResiduals {
  std::vector<double> mismatch, flux;
  double max_mismatch() const;
  double max_flux() const;
};
ShockResiduals shock_residuals(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi);

// Outward unit normal of the shock at node (i, ny).
Vec2 shock_normal(const Grid2D& grid, int i);

struct NonconvergenceError : std::runtime_error {
  NonconvergenceError(const std::string& what, std::vector<double> hist)
      : std::runtime_error(what), history(std::move(hist)) {}
  std::vector<double> history;
};

enum class InnerMethod { picard, newton };

struct PicardConfig {
  InnerMethod method = InnerMethod::newton;
  double tol = 1e-9;
  int max_iter = 200;
  double linear_rtol = 1e-11;
  double min_damping = 1.0 / 64;  // floor of the adaptive step damping

  PicardConfig with(InnerMethod m) const {
    PicardConfig c = *this;
    c.method = m;
    return c;
  }
};

struct InnerReport {
  int iterations = 0;
  double last_change = 0;
  double linear_residual = 0;  // worst relative residual of the linear sub-solves
  double damping = 1.0;        // final step damping
  bool fallback = false;       // Newton failed and damped Picard finished the solve
  std::vector<double> history;
  CoefficientStats stats;
};

// Nonlinear solve of the discrete system until the max-norm change of successive
// iterates drops below tol. picard: frozen coefficients, assemble -> sparse LU
// with adaptive step damping. newton: finite-difference Jacobian (every row
// depends on a 3x3 logical window, probed with 9 colours) with backtracking on
// the residual.
std::vector<double> picard_solve(const FlowContext& ctx, const Grid2D& grid, std::vector<double> psi,
                                 const CutoffConfig& cfg, const PicardConfig& pc, InnerReport& rep,
                                 Exec exec = Exec::parallel, const Manufactured* mms = nullptr);

}  // namespace srd
