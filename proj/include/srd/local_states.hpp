#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srd/thermo.hpp"

namespace srd {

inline constexpr double kPi = 3.14159265358979323846;

// OpenMP kernels keep a serial reference path selected by Exec.
enum class Exec { serial, parallel };

// Euler branch: incident shock between states (0) and (1).
struct EulerIncident {
  double gamma = 0, rho0 = 0, p0 = 0, rho1 = 0, p1 = 0;
  double u1 = 0;
  double c1 = 0;
  double m1_sq = 0;  // closed-form Mach relation
};

EulerIncident euler_incident(const GasParams& gas, double rho1);

// Euler branch: normal reflection off a vertical wall.
struct NormalReflectionState {
  double rho2 = 0, p2 = 0, xi1 = 0, c2 = 0;
  double t = 1;          // rho2 / rho1
  bool divergent = false;  // acoustic limit: t == 1 and xi1 undefined
};

NormalReflectionState normal_reflection(const EulerIncident& inc);
double normal_reflection_quadratic(double gamma, double m1_sq, double t);
// u1 = sqrt((p2 - p1)(rho2 - rho1)/(rho1 rho2))
double reconstructed_u1(const EulerIncident& inc, const NormalReflectionState& nr);
// M1^2 from the reflected-state form of the Mach relation.
double reflected_m1_sq(const EulerIncident& inc, const NormalReflectionState& nr);

// Potential branch: incident shock {xi = xi0}.
struct PotentialIncident {
  GasParams gas;
  double rho1 = 0;
  double u1 = 0;
  double xi0 = 0;
};

PotentialIncident potential_incident(const GasParams& gas, double rho1);
// Inverse of the closed-form Mach relation: rho1 with M1 = m1.
double rho1_from_m1(const GasParams& gas, double m1);

struct Potential {
  double phi = 0;
  Vec2 grad{0, 0};
};

enum class Branch { a, b };
const char* to_string(Branch b);

struct StateTwo {
  double theta_w = 0;
  double u2 = 0, v2 = 0;   // v2 = u2 tan(theta_w)
  double theta_sh = 0;     // angle of the straight reflected shock against the xi-axis
  double rho2 = 0, c2 = 0;
  Branch branch = Branch::a;
  double pseudo_speed_at_P0 = 0;  // +inf at theta_w = pi/2
  Vec2 p0{0, 0};                  // reflection point
};

Potential phi0(const Vec2& p);
Potential phi1(const PotentialIncident& pot, const Vec2& p);
Potential phi2(const PotentialIncident& pot, const StateTwo& s2, const Vec2& p);

// Unit normal of S1 = {phi1 = phi2}, pointing from state (2) into state (1).
Vec2 s1_normal(const PotentialIncident& pot, const StateTwo& s2);
// Point of S1 nearest the origin.
Vec2 s1_foot(const PotentialIncident& pot, const StateTwo& s2);
// [rho grad phi . nu] across S1 at a point of S1.
double rh_flux_residual(const PotentialIncident& pot, const StateTwo& s2, const Vec2& p);
// rho2 from the potential Bernoulli law at P0 as a function of u2.
double bernoulli_rho2(const PotentialIncident& pot, double theta_w, double u2);

// theta_w = pi/2: u2 = 0, reflected shock {xi = xi1}.
StateTwo normal_state_two(const PotentialIncident& pot);
double normal_xi1(const PotentialIncident& pot, const StateTwo& s2);

// Both roots (a: larger pseudo-speed at P0, b: smaller) or none when detached.
std::optional<std::pair<StateTwo, StateTwo>> state_two_solve(const PotentialIncident& pot, double theta_w);
StateTwo state_two_a(const PotentialIncident& pot, double theta_w);

struct SearchConfig {
  double tol = 1e-10;
};

struct TransitionAngles {
  double theta_d = 0;
  double theta_s = 0;
};

double detachment_angle(const PotentialIncident& pot, const SearchConfig& cfg = {});
double sonic_angle(const PotentialIncident& pot, const SearchConfig& cfg = {});
TransitionAngles transition_angles(const PotentialIncident& pot, const SearchConfig& cfg = {});

enum class SweepParameter { rho1, m1 };

struct TransitionRow {
  double parameter = 0;
  double theta_d = 0, theta_s = 0;
  bool ok = false;
  std::string error;
};

// Samples are independent; the result is identical for any thread count.
// kind = rho1: parameter is rho1/rho0; kind = m1: parameter is M1. The range may
// run either way; row k is at lo + (hi - lo) k/(n - 1).
std::vector<TransitionRow> transition_curve(const GasParams& gas, SweepParameter kind, double lo, double hi,
                                            int n_samples, const SearchConfig& cfg = {},
                                            Exec exec = Exec::parallel);

}  // namespace srd
