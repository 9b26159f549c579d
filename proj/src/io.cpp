#include "srd/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace srd {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& inequality, const std::string& values) {
  if (!ok) throw std::invalid_argument("RunConfig: " + inequality + " violated (" + values + ")");
}

double deg(double rad) { return rad * 180.0 / kPi; }

json vec(const Vec2& p) { return json::array({p[0], p[1]}); }

json state_json(const StateTwo& s) {
  return {{"theta_w_deg", deg(s.theta_w)},
          {"u2", s.u2},
          {"v2", s.v2},
          {"rho2", s.rho2},
          {"c2", s.c2},
          {"theta_sh_deg", deg(s.theta_sh)},
          {"branch", to_string(s.branch)},
          {"pseudo_speed_at_P0", s.pseudo_speed_at_P0},
          {"supersonic_at_P0", s.pseudo_speed_at_P0 > s.c2},
          {"P0", vec(s.p0)}};
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError(file.filename().string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Rows of a CSV file with a fixed header; each cell parsed as a double.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& file, const std::string& header) {
  const std::string name = file.filename().string();
  std::istringstream in(read_file(file));
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw ParseError(name + ":1: expected header '" + header + "'");
  const auto ncol = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1);
  std::vector<std::vector<double>> rows;
  for (int ln = 2; std::getline(in, line); ++ln) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t end = line.find(',', start);
      const std::string cell = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
      char* stop = nullptr;
      const double v = std::strtod(cell.c_str(), &stop);
      if (cell.empty() || *stop != '\0')
        throw ParseError(name + ":" + std::to_string(ln) + ": not a number: '" + cell + "'");
      row.push_back(v);
      if (end == std::string::npos) break;
      start = end + 1;
    }
    if (row.size() != ncol)
      throw ParseError(name + ":" + std::to_string(ln) + ": expected " + std::to_string(ncol) + " fields, got " +
                       std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void RunConfig::validate() const {
  require(gamma > 1, "gamma > 1", "gamma = " + fmt(gamma));
  require(rho0 > 0, "rho0 > 0", "rho0 = " + fmt(rho0));
  require(p0 > 0, "p0 > 0", "p0 = " + fmt(p0));
  require(rho1.has_value() != m1.has_value(), "exactly one of rho1, m1 given", "");
  if (rho1) require(*rho1 > rho0, "rho1 > rho0", "rho1 = " + fmt(*rho1) + ", rho0 = " + fmt(rho0));
  if (m1) require(*m1 > 0, "m1 > 0", "m1 = " + fmt(*m1));
  require(theta_w_deg > 0 && theta_w_deg <= 90, "0 < theta_w_deg <= 90", "theta_w_deg = " + fmt(theta_w_deg));
  require(nx >= 4 && ny >= 4, "nx, ny >= 4", "nx = " + std::to_string(nx) + ", ny = " + std::to_string(ny));
  require(grading > 0, "grading > 0", "grading = " + fmt(grading));
  require(lambda > 0 && lambda <= 1, "0 < lambda <= 1", "lambda = " + fmt(lambda));
  require(outer_tol > 0, "outer_tol > 0", "outer_tol = " + fmt(outer_tol));
  require(inner_tol > 0, "inner_tol > 0", "inner_tol = " + fmt(inner_tol));
  require(outer_max_iter > 0 && inner_max_iter > 0, "max iterations > 0", "");
  require(inner == "newton" || inner == "picard", "inner in {newton, picard}", "inner = " + inner);
  require(sweep == "rho1" || sweep == "m1", "sweep in {rho1, m1}", "sweep = " + sweep);
  require(samples >= 1, "samples >= 1", "samples = " + std::to_string(samples));
  solve_config().validate();
}

GasParams RunConfig::gas() const { return {gamma, rho0, p0}; }

double RunConfig::resolved_rho1() const { return rho1 ? *rho1 : rho1_from_m1(gas(), *m1); }

double RunConfig::theta_w() const { return theta_w_deg == 90.0 ? kPi / 2 : theta_w_deg * kPi / 180.0; }

SolveConfig RunConfig::solve_config() const {
  SolveConfig s;
  s.grid = {nx, ny, grading};
  s.cutoff.delta = delta;
  s.cutoff.near_arc_width = near_arc_width;
  s.cutoff.global_mach_cap = mach_cap;
  s.picard.tol = inner_tol;
  s.picard.max_iter = inner_max_iter;
  s.picard.method = inner == "picard" ? InnerMethod::picard : InnerMethod::newton;
  s.outer_tol = outer_tol;
  s.outer_max_iter = outer_max_iter;
  s.lambda = lambda;
  return s;
}

json to_json(const RunConfig& c) {
  json j = {{"gamma", c.gamma},         {"rho0", c.rho0},
            {"p0", c.p0},               {"theta_w_deg", c.theta_w_deg},
            {"nx", c.nx},               {"ny", c.ny},
            {"grading", c.grading},     {"delta", c.delta},
            {"near_arc_width", c.near_arc_width}, {"mach_cap", c.mach_cap},
            {"outer_tol", c.outer_tol}, {"outer_max_iter", c.outer_max_iter},
            {"lambda", c.lambda},       {"inner_tol", c.inner_tol},
            {"inner_max_iter", c.inner_max_iter}, {"inner", c.inner},
            {"sweep", c.sweep},         {"lo", c.lo},
            {"hi", c.hi},               {"samples", c.samples}};
  j["rho1"] = c.rho1 ? json(*c.rho1) : json(nullptr);
  j["m1"] = c.m1 ? json(*c.m1) : json(nullptr);
  return j;
}

RunConfig merge_json(RunConfig c, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("merge_json: configuration must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    auto num = [&](double& dst) { dst = v.get<double>(); };
    auto integer = [&](int& dst) { dst = v.get<int>(); };
    auto opt = [&](std::optional<double>& dst) { dst = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()); };
    if (key == "gamma") num(c.gamma);
    else if (key == "rho0") num(c.rho0);
    else if (key == "p0") num(c.p0);
    else if (key == "rho1") opt(c.rho1);
    else if (key == "m1") opt(c.m1);
    else if (key == "theta_w_deg") num(c.theta_w_deg);
    else if (key == "nx") integer(c.nx);
    else if (key == "ny") integer(c.ny);
    else if (key == "grading") num(c.grading);
    else if (key == "delta") num(c.delta);
    else if (key == "near_arc_width") num(c.near_arc_width);
    else if (key == "mach_cap") num(c.mach_cap);
    else if (key == "outer_tol") num(c.outer_tol);
    else if (key == "outer_max_iter") integer(c.outer_max_iter);
    else if (key == "lambda") num(c.lambda);
    else if (key == "inner_tol") num(c.inner_tol);
    else if (key == "inner_max_iter") integer(c.inner_max_iter);
    else if (key == "inner") c.inner = v.get<std::string>();
    else if (key == "sweep") c.sweep = v.get<std::string>();
    else if (key == "lo") num(c.lo);
    else if (key == "hi") num(c.hi);
    else if (key == "samples") integer(c.samples);
    else throw std::invalid_argument("merge_json: unknown key '" + key + "'");
  }
  return c;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json local_report(const RunConfig& c) {
  c.validate();
  const GasParams gas = c.gas();
  const double rho1 = c.resolved_rho1();
  json out;
  out["input"] = {{"gamma", c.gamma}, {"rho0", c.rho0}, {"p0", c.p0}, {"rho1", rho1}, {"theta_w_deg", c.theta_w_deg}};
  const auto e = euler_incident(gas, rho1);
  out["euler_incident"] = {{"rho0", e.rho0}, {"p0", e.p0},       {"rho1", e.rho1},
                           {"p1", e.p1},     {"u1", e.u1},       {"c1", e.c1},
                           {"M1_sq", e.m1_sq}, {"M1", std::sqrt(e.m1_sq)}};
  const auto nr = normal_reflection(e);
  out["normal_reflection"] = {{"rho2", nr.rho2}, {"p2", nr.p2},   {"xi1", nr.xi1},
                              {"c2", nr.c2},     {"rho2_over_rho1", nr.t},
                              {"p2_over_p1", nr.p2 / e.p1}, {"divergent", nr.divergent}};
  const auto pot = potential_incident(gas, rho1);
  out["potential_incident"] = {{"rho1", pot.rho1}, {"u1", pot.u1}, {"xi0", pot.xi0}};
  const auto sn = normal_state_two(pot);
  out["potential_normal_reflection"] = {{"u2", sn.u2}, {"rho2", sn.rho2}, {"c2", sn.c2}, {"xi1", normal_xi1(pot, sn)}};
  if (c.theta_w_deg == 90.0) {
    out["state_two"] = {{"a", state_json(sn)}, {"b", nullptr}, {"detached", false}};
  } else if (auto roots = state_two_solve(pot, c.theta_w())) {
    out["state_two"] = {{"a", state_json(roots->first)}, {"b", state_json(roots->second)}, {"detached", false}};
  } else {
    out["state_two"] = {{"a", nullptr}, {"b", nullptr}, {"detached", true}};
  }
  const auto t = transition_angles(pot);
  out["transition"] = {{"theta_d_deg", deg(t.theta_d)}, {"theta_s_deg", deg(t.theta_s)},
                       {"gap_deg", deg(t.theta_s - t.theta_d)}};
  return out;
}

std::string curves_csv(const std::vector<TransitionRow>& rows) {
  std::string s = "parameter,theta_d_deg,theta_s_deg,gap_deg,status\n";
  for (const auto& r : rows) {
    s += fmt(r.parameter) + ",";
    if (r.ok) {
      s += fmt(deg(r.theta_d)) + "," + fmt(deg(r.theta_s)) + "," + fmt(deg(r.theta_s - r.theta_d)) + ",ok\n";
    } else {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      s += "nan,nan,nan,failed: " + msg + "\n";
    }
  }
  return s;
}

json to_json(const Check& c) {
  return {{"value", c.value}, {"tolerance", c.tolerance}, {"status", to_string(c.status)}, {"note", c.note}};
}

json to_json(const DiagnosticsBlock& d) {
  json drr = {{"y", d.drr.y},
              {"x", d.drr.x},
              {"drr", d.drr.drr},
              {"drt", d.drr.drt},
              {"dtt", d.drr.dtt},
              {"limit", d.drr.limit},
              {"limit_linear", d.drr.limit_linear},
              {"noise", d.drr.noise},
              {"drt_limit", d.drr.drt_limit},
              {"dtt_limit", d.drr.dtt_limit},
              {"target", d.drr.target}};
  return {{"ordering_violation", to_json(d.ordering)},
          {"ellipticity_margin", to_json(d.ellipticity)},
          {"psi_x_bound_ratio", to_json(d.psi_x_bound)},
          {"measured_delta0", d.measured_delta0},
          {"proof_bound_ratio", d.proof_bound_ratio},
          {"rh_residual_max", to_json(d.rh_residual)},
          {"fhat_min_slope", to_json(d.fhat_slope)},
          {"drr_jump_estimate", to_json(d.drr_jump)},
          {"drr_extrapolation", drr},
          {"cross_derivatives", to_json(d.cross_derivatives)},
          {"parabolic_norm_estimate", to_json(d.parabolic_norm)},
          {"w11_distance_to_normal", to_json(d.w11_to_normal)},
          {"verified", d.verified()}};
}

json to_json(const SolveReport& r) {
  json hist = json::array();
  for (const auto& h : r.history)
    hist.push_back({{"displacement", h.displacement},
                    {"mismatch", h.mismatch},
                    {"rh_residual", h.rh_residual},
                    {"inner_iterations", h.inner_iterations},
                    {"lambda", h.lambda}});
  return {{"history", hist},
          {"converged", r.converged},
          {"analytic", r.analytic},
          {"verified", r.verified},
          {"omega_violations", r.omega_violations},
          {"backoffs", r.backoffs},
          {"coefficient_stats",
           {{"interior", r.stats.interior},
            {"band_clamped", r.stats.band_clamped},
            {"floored", r.stats.floored},
            {"capped", r.stats.capped},
            {"min_coefficient", r.stats.min_coefficient}}},
          {"diagnostics", to_json(r.diagnostics)},
          {"threads", "results do not depend on the OpenMP thread count"}};
}

std::string fields_csv(const Solution& s) {
  const auto& g = s.grid;
  const auto& ctx = s.ctx;
  std::string out = "i,j,xi,eta,x,y,phi,psi,rho,mach_margin\n";
  const auto nsc = near_sonic_coords(ctx.geo);
  for (int i = 0; i <= g.nx; ++i)
    for (int j = 0; j <= g.ny; ++j) {
      const int k = g.idx(i, j);
      const Vec2& p = g.p[k];
      const auto f2 = phi2(ctx.pot, ctx.s2, p);
      const Vec2 gp = g.grad(s.psi, i, j);
      const Vec2 gphi{f2.grad[0] + gp[0], f2.grad[1] + gp[1]};
      const double phi = f2.phi + s.psi[k];
      const double q2 = gphi[0] * gphi[0] + gphi[1] * gphi[1];
      const double c2 = sonic_speed_selfsim(q2, phi, ctx.pot.gas);
      const double rho = c2 > 0 ? bernoulli_density(q2, phi, ctx.pot.gas) : NAN;
      const double margin = c2 > 0 ? 1 - std::sqrt(q2 / c2) : NAN;
      const double r = std::hypot(p[0] - ctx.s2.u2, p[1] - ctx.s2.v2);
      const double y = r > 0 ? nsc.to_xy(p)[1] : NAN;  // undefined at the sonic center
      out += std::to_string(i) + "," + std::to_string(j) + "," + fmt(p[0]) + "," + fmt(p[1]) + "," +
             fmt(ctx.s2.c2 - r) + "," + fmt(y) + "," + fmt(phi) + "," + fmt(s.psi[k]) + "," + fmt(rho) + "," +
             fmt(margin) + "\n";
    }
  return out;
}

std::string shock_csv(const Solution& s, double width) {
  const auto nsc = near_sonic_coords(s.ctx.geo);
  const auto& eta = s.shock.knot_eta();
  const auto& xi = s.shock.knot_xi();
  std::string out = "s,xi,eta,x,y,in_band\n";
  double arc = 0;
  for (std::size_t n = eta.size(); n-- > 0;) {
    if (n + 1 < eta.size()) arc += std::hypot(xi[n] - xi[n + 1], eta[n] - eta[n + 1]);
    const Vec2 q = nsc.to_xy({xi[n], eta[n]});
    out += fmt(arc) + "," + fmt(xi[n]) + "," + fmt(eta[n]) + "," + fmt(q[0]) + "," + fmt(q[1]) + "," +
           (q[0] < width * s.ctx.s2.c2 ? "1" : "0") + "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("write_text: cannot open " + file.string());
  out << text;
  if (!out) throw std::runtime_error("write_text: write failed for " + file.string());
}

Artifact load_artifact(const std::filesystem::path& dir) {
  Artifact a;
  json j;
  try {
    j = json::parse(read_file(dir / "config.json"));
    a.cfg = merge_json(RunConfig{}, j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config.json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("config.json: ") + e.what());
  }
  a.cfg.validate();
  const auto pot = potential_incident(a.cfg.gas(), a.cfg.resolved_rho1());
  const bool normal = a.cfg.theta_w_deg == 90.0;
  a.ctx = make_context(pot, normal ? normal_state_two(pot) : state_two_a(pot, a.cfg.theta_w()));
  const auto knots = read_csv(dir / "shock.csv", "s,xi,eta,x,y,in_band");
  if (knots.size() < 2) throw ParseError("shock.csv: fewer than two knots");
  std::vector<double> eta, xi;
  for (auto it = knots.rbegin(); it != knots.rend(); ++it) eta.push_back((*it)[2]), xi.push_back((*it)[1]);
  for (std::size_t k = 1; k < eta.size(); ++k)
    if (!(eta[k] > eta[k - 1]))
      throw ParseError("shock.csv:" + std::to_string(knots.size() - k + 2) + ": knots not ordered by arclength");
  const ShockCurve shock(eta, xi, a.ctx.geo.s1_down[0] / a.ctx.geo.s1_down[1]);
  a.grid = build_grid(a.ctx.geo, shock, a.cfg.solve_config().grid);
  const auto rows = read_csv(dir / "fields.csv", "i,j,xi,eta,x,y,phi,psi,rho,mach_margin");
  if (rows.size() != a.grid.size())
    throw ParseError("fields.csv: expected " + std::to_string(a.grid.size()) + " nodes, got " +
                     std::to_string(rows.size()));
  a.psi.assign(a.grid.size(), NAN);
  std::vector<bool> seen(a.grid.size(), false);
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const auto& r = rows[n];
    const std::string where = "fields.csv:" + std::to_string(n + 2) + ": ";
    const int i = static_cast<int>(r[0]), j = static_cast<int>(r[1]);
    if (i != r[0] || j != r[1] || i < 0 || j < 0 || i > a.grid.nx || j > a.grid.ny)
      throw ParseError(where + "invalid node index");
    const int k = a.grid.idx(i, j);
    if (seen[k]) throw ParseError(where + "duplicate node");
    seen[k] = true;
    const Vec2& p = a.grid.p[k];
    if (std::abs(p[0] - r[2]) > 1e-9 * (1 + std::abs(p[0])) || std::abs(p[1] - r[3]) > 1e-9 * (1 + std::abs(p[1])))
      throw ParseError(where + "node does not lie on the grid rebuilt from shock.csv");
    if (!std::isfinite(r[6])) throw ParseError(where + "phi is not finite");
    // phi is authoritative; psi is re-derived from it
    a.psi[k] = r[6] - phi2(a.ctx.pot, a.ctx.s2, p).phi;
  }
  return a;
}

}  // namespace srd
