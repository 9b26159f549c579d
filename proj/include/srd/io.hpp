#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "srd/free_boundary.hpp"

namespace srd {

// Malformed artifact; the message names the file and line.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// User-facing configuration; angles in degrees.
struct RunConfig {
  double gamma = 1.4, rho0 = 1.0, p0 = 1.0;
  std::optional<double> rho1;  // exactly one of rho1, m1
  std::optional<double> m1;
  double theta_w_deg = 89.0;
  int nx = 64, ny = 64;
  double grading = 2.0;
  double delta = 0.25, near_arc_width = 0.2, mach_cap = 0.95;
  double outer_tol = 1e-7;
  int outer_max_iter = 60;
  double lambda = 0.5;
  double inner_tol = 1e-9;
  int inner_max_iter = 200;
  std::string inner = "newton";  // newton | picard
  // curves
  std::string sweep = "rho1";  // rho1 (ratio rho1/rho0) | m1
  double lo = 1.5, hi = 4.0;
  int samples = 50;

  void validate() const;
  GasParams gas() const;
  double resolved_rho1() const;
  double theta_w() const;  // radians
  SolveConfig solve_config() const;
};

nlohmann::json to_json(const RunConfig& c);
// Keys present in j override base; unknown keys are rejected.
RunConfig merge_json(RunConfig base, const nlohmann::json& j);

// %.17g: round-trip decimal.
std::string fmt(double v);

// Local algebra: incident shock, normal reflection, potential states, both
// state-(2) roots at theta_w and the transition angles.
nlohmann::json local_report(const RunConfig& c);

// CSV: parameter,theta_d_deg,theta_s_deg,gap_deg,status
std::string curves_csv(const std::vector<TransitionRow>& rows);

nlohmann::json to_json(const Check& c);
nlohmann::json to_json(const DiagnosticsBlock& d);
nlohmann::json to_json(const SolveReport& r);

// fields.csv: i,j,xi,eta,x,y,phi,psi,rho,mach_margin
std::string fields_csv(const Solution& s);
// shock.csv: shock-curve knots from P1 by arclength: s,xi,eta,x,y,in_band
std::string shock_csv(const Solution& s, double near_arc_width);

void write_text(const std::filesystem::path& file, const std::string& text);

// Rebuilds (context, grid, psi) from config.json, shock.csv and fields.csv.
struct Artifact {
  RunConfig cfg;
  FlowContext ctx;
  Grid2D grid;
  std::vector<double> psi;
};
Artifact load_artifact(const std::filesystem::path& dir);

}  // namespace srd
