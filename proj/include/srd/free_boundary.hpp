#pragma once

#include <functional>
#include <vector>

#include "srd/diagnostics.hpp"
#include "srd/elliptic_core.hpp"

namespace srd {

struct RegimeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegenerateUpdateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveConfig {
  GridConfig grid;
  CutoffConfig cutoff;
  PicardConfig picard;
  double outer_tol = 1e-7;  // max shock displacement, relative to c2
  int outer_max_iter = 60;
  double lambda = 0.5;        // under-relaxation of the shock update
  double lambda_min = 0.05;   // floor of the adaptive halving
  double omega = 0.0;         // floor for the near-arc slope dy/dx of the shock
  Exec exec = Exec::parallel;
  // Called after every completed inner solve, before the shock update.
  std::function<void(int outer, const InnerReport&, const Grid2D&, const std::vector<double>& psi)> observer;

  void validate() const;
};

struct OuterRecord {
  double displacement = 0;
  double mismatch = 0;  // max |phi - phi1| on the shock
  double rh_residual = 0;
  int inner_iterations = 0;
  double lambda = 0;
};

struct SolveReport {
  std::vector<OuterRecord> history;
  bool converged = false;
  bool analytic = false;  // theta_w = pi/2: normal reflection, no iteration
  int omega_violations = 0;
  int backoffs = 0;  // shock steps retried with halved relaxation after an inner failure
  CoefficientStats stats;
  DiagnosticsBlock diagnostics;  // of the returned field
  bool verified = false;         // converged and every diagnostics gate passed
  double wall_seconds = 0;
};

struct Solution {
  FlowContext ctx;
  SolveConfig cfg;
  ShockCurve shock;
  Grid2D grid;
  std::vector<double> psi;  // phi - phi2 at the grid nodes
  SolveReport report;

  double phi(std::size_t k) const;
};

// S1 continued from P1 into a circular arc meeting {eta = 0} orthogonally.
ShockCurve initial_shock(const WedgeGeometry& geo);

// Level-set update of the shock: each node moves along its normal by
// -lambda (phi - phi1)/d_n(phi - phi1); P1 stays pinned, P2 stays on {eta = 0}.
struct ShockUpdate {
  ShockCurve shock;
  double displacement = 0;
  bool omega_violated = false;
};
ShockUpdate update_shock(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi, double lambda,
                         double omega = 0.0);

// Outer iteration. theta_w in radians; theta_w = pi/2 returns the normal reflection.
Solution solve(const GasParams& gas, double rho1, double theta_w, const SolveConfig& cfg = {});

}  // namespace srd
