#include "srd/local_states.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace srd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

// Root of f on [lo, hi] with a sign change, to full double precision.
template <class F>
double bracket_root(F f, double lo, double hi) {
  boost::uintmax_t it = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)); };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, it);
  return 0.5 * (r.first + r.second);
}

// Downstream density of a potential shock with upstream density rho1 and normal
// speed qn: rho^(g-1) - rho1^(g-1) = (g-1)/2 qn^2 (1 - rho1^2/rho^2), rho > rho1.
double shock_density(double gamma, double rho1, double qn) {
  const double gm = gamma - 1.0;
  const double b1 = std::pow(rho1, gm);
  if (qn * qn <= b1) return rho1;
  // f(rho)/(rho - rho1) removes the trivial root rho = rho1
  auto f = [&](double r) { return std::pow(r, gm) - b1 - 0.5 * gm * qn * qn * (1.0 - rho1 * rho1 / (r * r)); };
  double lo = rho1 * (1.0 + 1e-14);
  if (f(lo) >= 0.0) return rho1;
  double hi = 2.0 * rho1;
  while (f(hi) < 0.0) hi *= 2.0;
  return bracket_root(f, lo, hi);
}

// Oblique potential shock at P0 with unit normal nu = (cos a, sin a). The
// normal angle itself is the unknown: it stays O(1) while |U1| grows like
// tan(theta_w), so U1 . nu keeps full precision near theta_w = pi/2.
// G = e_w x (u2, v2) vanishes for a state (2) moving parallel to the wedge.
struct Polar {
  const PotentialIncident& pot;
  double theta_w;
  Vec2 p0, U1, ew;
  double q1, c1;
  double a_normal = 0, a_mach = 0;  // normal shock and Mach-wave ends of the polar

  Polar(const PotentialIncident& pot_, double tw) : pot(pot_), theta_w(tw) {
    p0 = {pot.xi0, pot.xi0 * std::tan(tw)};
    U1 = {pot.u1 - p0[0], -p0[1]};
    ew = {std::cos(tw), std::sin(tw)};
    q1 = std::hypot(U1[0], U1[1]);
    c1 = std::pow(pot.rho1, 0.5 * (pot.gas.gamma - 1.0));
    a_normal = std::atan2(U1[1], U1[0]);
    const double turn = std::remainder(std::atan2(-ew[1], -ew[0]) - a_normal, 2 * kPi);
    const double s = turn >= 0 ? 1.0 : -1.0;
    a_mach = a_normal - s * (q1 > c1 ? std::acos(c1 / q1) : 0.0);
  }

  bool supersonic() const { return a_mach != a_normal; }

  struct Out {
    double G;
    Vec2 uv;
    double rho2;
  };

  Out eval(double a) const {
    const Vec2 nu{std::cos(a), std::sin(a)};
    const double un = dot(U1, nu);
    const double r2 = shock_density(pot.gas.gamma, pot.rho1, un);
    const double jump = un * (1.0 - pot.rho1 / r2);
    const Vec2 uv{pot.u1 - jump * nu[0], -jump * nu[1]};
    return {ew[0] * uv[1] - ew[1] * uv[0], uv, r2};
  }
  double G(double a) const { return eval(a).G; }
  double at(double t) const { return a_normal + t * (a_mach - a_normal); }

  // Maximum of G along the polar; G is unimodal between the two ends.
  std::pair<double, double> max_G() const {
    constexpr int n = 400;
    int k = 1;
    double best = -kInf;
    for (int i = 1; i < n; ++i) {
      const double g = G(at(double(i) / n));
      if (g > best) best = g, k = i;
    }
    double lo = at(double(k - 1) / n), hi = at(double(k + 1) / n);
    if (lo > hi) std::swap(lo, hi);
    auto r = boost::math::tools::brent_find_minima([&](double a) { return -G(a); }, lo, hi, 52);
    return {r.first, -r.second};
  }
};

StateTwo make_state(const PotentialIncident& pot, const Polar& pl, double a, Branch br) {
  const auto o = pl.eval(a);
  StateTwo st;
  st.theta_w = pl.theta_w;
  st.u2 = o.uv[0];
  st.v2 = st.u2 * std::tan(pl.theta_w);
  st.rho2 = o.rho2;
  st.c2 = std::pow(o.rho2, 0.5 * (pot.gas.gamma - 1.0));
  st.theta_sh = std::atan2(pot.u1 - st.u2, st.v2);
  st.branch = br;
  st.p0 = pl.p0;
  st.pseudo_speed_at_P0 = std::hypot(st.u2 - pl.p0[0], st.v2 - pl.p0[1]);
  return st;
}

}  // namespace

EulerIncident euler_incident(const GasParams& gas, double rho1) {
  gas.validate();
  const double g = gas.gamma, r0 = gas.rho0;
  if (!(rho1 > r0)) throw std::invalid_argument("euler_incident: entropy condition rho1 > rho0 violated");
  const double den = (g + 1) * r0 - (g - 1) * rho1;
  if (!(den > 0.0)) throw std::invalid_argument("euler_incident: rho1 beyond maximal compression (g+1)/(g-1) rho0");
  EulerIncident e;
  e.gamma = g;
  e.rho0 = r0;
  e.p0 = gas.p0;
  e.rho1 = rho1;
  e.p1 = gas.p0 * ((g + 1) * rho1 - (g - 1) * r0) / den;
  e.u1 = std::sqrt((e.p1 - e.p0) * (rho1 - r0) / (r0 * rho1));
  e.c1 = sonic_speed_euler(gas, e.p1, rho1);
  e.m1_sq = 2 * (rho1 - r0) * (rho1 - r0) / (r0 * ((g + 1) * rho1 - (g - 1) * r0));
  return e;
}

double normal_reflection_quadratic(double gamma, double m1_sq, double t) {
  return (1 + 0.5 * (gamma - 1) * m1_sq) * t * t - (2 + 0.5 * (gamma + 1) * m1_sq) * t + 1;
}

NormalReflectionState normal_reflection(const EulerIncident& inc) {
  const double g = inc.gamma, m2 = inc.m1_sq, m = std::sqrt(m2);
  // t - 1 written without cancellation
  const double tm1 = ((3 - g) * m2 + m * std::sqrt(16 + (g + 1) * (g + 1) * m2)) / (2 * (2 + (g - 1) * m2));
  NormalReflectionState nr;
  nr.t = 1 + tm1;
  nr.rho2 = inc.rho1 * nr.t;
  nr.p2 = inc.p1 * ((g + 1) * nr.rho2 - (g - 1) * inc.rho1) / ((g + 1) * inc.rho1 - (g - 1) * nr.rho2);
  nr.c2 = std::sqrt(g * nr.p2 / nr.rho2);
  nr.divergent = !(tm1 > 0.0);
  nr.xi1 = nr.divergent ? -kInf : -inc.rho1 * inc.u1 / (inc.rho1 * tm1);
  return nr;
}

double reconstructed_u1(const EulerIncident& inc, const NormalReflectionState& nr) {
  return std::sqrt((nr.p2 - inc.p1) * (nr.rho2 - inc.rho1) / (inc.rho1 * nr.rho2));
}

double reflected_m1_sq(const EulerIncident& inc, const NormalReflectionState& nr) {
  const double g = inc.gamma, d = nr.rho2 - inc.rho1;
  return 2 * d * d / (nr.rho2 * ((g + 1) * inc.rho1 - (g - 1) * nr.rho2));
}

PotentialIncident potential_incident(const GasParams& gas, double rho1) {
  gas.validate();
  const double g = gas.gamma, r0 = gas.rho0;
  if (!(rho1 > r0)) throw std::invalid_argument("potential_incident: entropy condition rho1 > rho0 violated");
  PotentialIncident p;
  p.gas = gas;
  p.rho1 = rho1;
  p.u1 = std::sqrt(2 * (rho1 - r0) * (std::pow(rho1, g - 1) - std::pow(r0, g - 1)) / ((g - 1) * (rho1 + r0)));
  p.xi0 = rho1 * p.u1 / (rho1 - r0);
  return p;
}

double rho1_from_m1(const GasParams& gas, double m1) {
  gas.validate();
  if (!(m1 > 0.0)) throw std::invalid_argument("rho1_from_m1: m1 must be positive");
  const double g = gas.gamma;
  return gas.rho0 * (1 + m1 * ((g + 1) * m1 + std::sqrt((g + 1) * (g + 1) * m1 * m1 + 16)) / 4);
}

const char* to_string(Branch b) { return b == Branch::a ? "a" : "b"; }

Potential phi0(const Vec2& p) { return {-0.5 * dot(p, p), {-p[0], -p[1]}}; }

Potential phi1(const PotentialIncident& pot, const Vec2& p) {
  return {-0.5 * dot(p, p) + pot.u1 * (p[0] - pot.xi0), {pot.u1 - p[0], -p[1]}};
}

Potential phi2(const PotentialIncident& pot, const StateTwo& s2, const Vec2& p) {
  if (s2.u2 == 0.0) {
    // fluid at rest, matched to phi1 on {xi = xi1}
    const double xi1 = normal_xi1(pot, s2);
    return {-0.5 * dot(p, p) + pot.u1 * (xi1 - pot.xi0), {-p[0], -p[1]}};
  }
  const double eta0 = pot.xi0 * std::tan(s2.theta_w);
  return {-0.5 * dot(p, p) + s2.u2 * (p[0] - pot.xi0) + (p[1] - eta0) * s2.v2, {s2.u2 - p[0], s2.v2 - p[1]}};
}

Vec2 s1_normal(const PotentialIncident& pot, const StateTwo& s2) {
  const double nx = pot.u1 - s2.u2, ny = -s2.v2, n = std::hypot(nx, ny);
  return {-nx / n, -ny / n};
}

Vec2 s1_foot(const PotentialIncident& pot, const StateTwo& s2) {
  if (s2.u2 == 0.0) return {normal_xi1(pot, s2), 0.0};
  // (u1 - u2) xi - v2 eta = (u1 - u2) xi0 - v2 eta0
  const double a = pot.u1 - s2.u2, b = -s2.v2;
  const double d = a * pot.xi0 - s2.u2 * std::tan(s2.theta_w) * std::tan(s2.theta_w) * pot.xi0;
  const double n2 = a * a + b * b;
  return {a * d / n2, b * d / n2};
}

double rh_flux_residual(const PotentialIncident& pot, const StateTwo& s2, const Vec2& p) {
  const Vec2 nu = s1_normal(pot, s2);
  const auto a = phi1(pot, p), b = phi2(pot, s2, p);
  return s2.rho2 * dot(b.grad, nu) - pot.rho1 * dot(a.grad, nu);
}

double bernoulli_rho2(const PotentialIncident& pot, double theta_w, double u2) {
  const double g = pot.gas.gamma, sec = 1.0 / std::cos(theta_w);
  const double base = std::pow(pot.gas.rho0, g - 1) - (g - 1) * sec * sec * (0.5 * u2 * u2 - u2 * pot.xi0);
  if (base < 0.0) throw CavitationError("bernoulli_rho2: negative base");
  return std::pow(base, 1.0 / (g - 1));
}

StateTwo normal_state_two(const PotentialIncident& pot) {
  const double g = pot.gas.gamma, r1 = pot.rho1, u1 = pot.u1;
  const double k = std::pow(pot.gas.rho0, g - 1) + (g - 1) * u1 * pot.xi0;
  // increasing in rho2 on (rho1, inf)
  auto H = [&](double r) { return std::pow(r, g - 1) - k - (g - 1) * r1 * u1 * u1 / (r - r1); };
  double hi = 2 * r1;
  while (H(hi) < 0.0) hi *= 2;
  double d = hi - r1;
  while (H(r1 + d) >= 0.0) d *= 0.5;
  const double lo = r1 + d;
  StateTwo st;
  st.theta_w = 0.5 * kPi;
  st.rho2 = bracket_root(H, lo, hi);
  st.c2 = std::pow(st.rho2, 0.5 * (g - 1));
  st.theta_sh = 0.5 * kPi;
  st.pseudo_speed_at_P0 = kInf;
  st.p0 = {pot.xi0, kInf};
  return st;
}

double normal_xi1(const PotentialIncident& pot, const StateTwo& s2) {
  return -pot.rho1 * pot.u1 / (s2.rho2 - pot.rho1);
}

std::optional<std::pair<StateTwo, StateTwo>> state_two_solve(const PotentialIncident& pot, double theta_w) {
  if (!(theta_w > 0.0 && theta_w <= 0.5 * kPi)) throw std::invalid_argument("state_two_solve: theta_w must lie in (0, pi/2]");
  if (theta_w == 0.5 * kPi) {
    const auto st = normal_state_two(pot);
    auto sb = st;
    sb.branch = Branch::b;
    return std::make_pair(st, sb);
  }
  const Polar pl(pot, theta_w);
  if (!pl.supersonic()) return std::nullopt;
  const auto [astar, gmax] = pl.max_G();
  if (!(gmax > 0.0)) return std::nullopt;
  auto G = [&](double a) { return pl.G(a); };
  auto root = [&](double end) { return end < astar ? bracket_root(G, end, astar) : bracket_root(G, astar, end); };
  const double aa = root(pl.a_mach);
  const double ab = pl.G(pl.a_normal) >= 0.0 ? pl.a_normal : root(pl.a_normal);
  return std::make_pair(make_state(pot, pl, aa, Branch::a), make_state(pot, pl, ab, Branch::b));
}

StateTwo state_two_a(const PotentialIncident& pot, double theta_w) {
  const auto r = state_two_solve(pot, theta_w);
  if (!r) throw std::domain_error("state_two_a: no reflected state (theta_w below detachment)");
  return r->first;
}

namespace {

bool attached(const PotentialIncident& pot, double tw) {
  const Polar pl(pot, tw);
  return pl.supersonic() && pl.max_G().second > 0.0;
}

}  // namespace

double detachment_angle(const PotentialIncident& pot, const SearchConfig& cfg) {
  double lo = 1e-6, hi = 0.5 * kPi - 1e-9;
  if (attached(pot, lo) || !attached(pot, hi)) throw std::runtime_error("detachment_angle: no bracket in (0, pi/2)");
  while (hi - lo > cfg.tol) {
    const double mid = 0.5 * (lo + hi);
    (attached(pot, mid) ? hi : lo) = mid;
  }
  return hi;
}

double sonic_angle(const PotentialIncident& pot, const SearchConfig& cfg) {
  const double td = detachment_angle(pot, cfg);
  auto h = [&](double tw) {
    const auto a = state_two_a(pot, tw);
    return a.pseudo_speed_at_P0 - a.c2;
  };
  const double lo = td + cfg.tol, hi = 0.5 * kPi - 1e-6;
  if (!(h(lo) < 0.0) || !(h(hi) > 0.0)) throw std::runtime_error("sonic_angle: no sign change in (theta_d, pi/2)");
  boost::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(h, lo, hi, [&](double a, double b) { return std::abs(b - a) <= cfg.tol; }, it);
  return 0.5 * (r.first + r.second);
}

TransitionAngles transition_angles(const PotentialIncident& pot, const SearchConfig& cfg) {
  return {detachment_angle(pot, cfg), sonic_angle(pot, cfg)};
}

std::vector<TransitionRow> transition_curve(const GasParams& gas, SweepParameter kind, double lo, double hi,
                                            int n_samples, const SearchConfig& cfg, Exec exec) {
  gas.validate();
  if (n_samples < 1) throw std::invalid_argument("transition_curve: n_samples must be positive");
  if (!(lo > 0.0) || !(hi > 0.0)) throw std::invalid_argument("transition_curve: range must be positive");
  if (n_samples > 1 && lo == hi) throw std::invalid_argument("transition_curve: empty range (lo == hi)");
  std::vector<TransitionRow> rows(n_samples);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
  for (int i = 0; i < n_samples; ++i) {
    auto& row = rows[i];
    row.parameter = n_samples == 1 ? lo : lo + (hi - lo) * i / (n_samples - 1);
    try {
      const double rho1 = kind == SweepParameter::rho1 ? row.parameter * gas.rho0 : rho1_from_m1(gas, row.parameter);
      const auto t = transition_angles(potential_incident(gas, rho1), cfg);
      row.theta_d = t.theta_d;
      row.theta_s = t.theta_s;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  return rows;
}

}  // namespace srd
