#pragma once

#include <string>
#include <vector>

#include "srd/elliptic_core.hpp"

namespace srd {

enum class Status { pass, fail, inconclusive };
const char* to_string(Status s);

// A measured number with the threshold it was judged against.
struct Check {
  double value = 0;
  double tolerance = 0;
  Status status = Status::inconclusive;
  std::string note;
};

// Maximal violation of phi2 <= phi <= phi1 over the closed domain; tolerance
// 1e-7 of the dynamic range of phi.
Check check_ordering(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi);

// min over interior nodes of c_*(phi) - |grad phi| (uncut coefficients).
Check check_ellipticity(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi);

// max over the near-arc band x < width of |psi_x| (gamma + 1)/(2x); pass < 1.
// Fewer than 8 columns in the band: inconclusive.
Check check_psi_x_bound(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi, double width);

// Flux jump [rho grad phi . nu] on the shock measured with first-order
// one-sided gradients from Omega; tolerance C h, C = max |rho1 grad phi1 . nu|, h = 1/ny.
Check check_rh_residual(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi);

// min slope dy/dx of the shock near the arc (x < width) in (x, y) coordinates;
// points ordered from P1 away from the arc.
Check check_fhat_slope(const FlowContext& ctx, const std::vector<Vec2>& shock_points, double width);

// Radial second differences of psi at fixed y on the first columns off the
// arc, extrapolated to x -> 0+; the limit of D_rr(phi - phi2) is 1/(gamma + 1).
struct DrrEstimate {
  double y = 0;                       // station angle (y = theta - theta_w)
  std::vector<double> x, drr, drt, dtt;  // per station: D_rr, D_r theta, D_theta theta of psi
  double limit = 0;                   // three-station (quadratic) extrapolation
  double limit_linear = 0;            // two-station extrapolation
  double noise = 0;                   // |limit - limit_linear|
  double drt_limit = 0, dtt_limit = 0;
  double target = 0;                  // 1/(gamma + 1)
  Status status = Status::inconclusive;
};
// y_fraction in (0, 1): station at y = y_fraction * y(P1).
DrrEstimate estimate_drr_jump(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi,
                              double y_fraction = 0.5, int stations = 3);

// sup over the band of x^(k + l/2 - 2) |d_x^k d_y^l psi|, k + l <= 2.
Check parabolic_norm_estimate(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi, double width);

// Discrete W^{1,1} distance to the normal reflection on the fixed rectangle
// K = [0.85 xi1, 0.05 xi1] x [0, 0.5 c2] of the normal reflection (shrunk
// about its centre by `scale`), midpoint rule on m x m cells.
double w11_distance_to_normal(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi,
                              int m = 40, double scale = 1.0);

struct DiagnosticsBlock {
  Check ordering, ellipticity, psi_x_bound, rh_residual, fhat_slope, drr_jump, cross_derivatives, parabolic_norm;
  Check w11_to_normal;  // inconclusive when the comparison rectangle leaves Omega
  double measured_delta0 = 0;  // 2 (1 - psi_x ratio)
  double proof_bound_ratio = 0;  // psi_x ratio against the proof bound 4x/(3(gamma + 1))
  DrrEstimate drr;
  // Gates: ordering, ellipticity, psi_x bound, RH residual, f-hat slope; none
  // failed (inconclusive is not a failure). The D_rr, cross-derivative and
  // parabolic-norm entries are measurements judged by refinement trends.
  bool verified() const;
};

DiagnosticsBlock diagnose(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi,
                          const CutoffConfig& cutoff);

}  // namespace srd
