#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "srd/io.hpp"

using nlohmann::json;
using namespace srd;

namespace {

// Flags left unset keep the value from the config file (or the default).
struct Flags {
  std::string config;
  std::optional<double> gamma, rho0, p0, rho1, m1, theta_w, grading, delta, band, cap, outer_tol, lambda, inner_tol, lo,
      hi;
  std::optional<int> n, nx, ny, outer_max_iter, inner_max_iter, samples;
  std::optional<std::string> inner, sweep;

  void add_gas(CLI::App* c) {
    c->add_option("--config", config, "JSON configuration file (flags override it)");
    c->add_option("--gamma", gamma, "adiabatic exponent (> 1)");
    c->add_option("--rho0", rho0, "density of state (0)");
    c->add_option("--p0", p0, "pressure of state (0), Euler branch");
    c->add_option("--rho1", rho1, "density behind the incident shock");
    c->add_option("--m1", m1, "incident Mach number (alternative to --rho1)");
  }
  void add_solve(CLI::App* c) {
    c->add_option("--theta-w", theta_w, "wedge angle in degrees, (0, 90]");
    c->add_option("--n", n, "grid cells in both directions");
    c->add_option("--nx", nx, "grid cells along the wedge");
    c->add_option("--ny", ny, "grid cells from wedge to shock");
    c->add_option("--grading", grading, "column clustering at the sonic arc");
    c->add_option("--delta", delta, "cutoff slack delta");
    c->add_option("--band", band, "near-arc band width, fraction of c2");
    c->add_option("--mach-cap", cap, "cap on |grad phi|/c_* outside the band");
    c->add_option("--outer-tol", outer_tol, "shock displacement tolerance, fraction of c2");
    c->add_option("--outer-max-iter", outer_max_iter, "outer iterations");
    c->add_option("--lambda", lambda, "shock-update relaxation, (0, 1]");
    c->add_option("--inner-tol", inner_tol, "inner iteration tolerance");
    c->add_option("--inner-max-iter", inner_max_iter, "inner iterations");
    c->add_option("--inner", inner, "inner solver: newton or picard");
  }
  void add_sweep(CLI::App* c) {
    c->add_option("--sweep", sweep, "sweep parameter: rho1 (ratio rho1/rho0) or m1");
    c->add_option("--lo", lo, "lower end of the sweep");
    c->add_option("--hi", hi, "upper end of the sweep");
    c->add_option("--samples", samples, "number of samples");
  }

  RunConfig resolve() const {
    RunConfig c;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw std::invalid_argument("config: cannot open " + config);
      try {
        c = merge_json(c, json::parse(in));
      } catch (const json::exception& e) {
        throw std::invalid_argument("config: " + config + ": " + e.what());
      }
    }
    auto set = [](auto& dst, const auto& src) {
      if (src) dst = *src;
    };
    set(c.gamma, gamma), set(c.rho0, rho0), set(c.p0, p0);
    if (rho1) c.rho1 = rho1, c.m1.reset();
    if (m1) c.m1 = m1, c.rho1.reset();
    if (!c.rho1 && !c.m1) c.rho1 = 2.0;
    set(c.theta_w_deg, theta_w);
    if (n) c.nx = c.ny = *n;
    set(c.nx, nx), set(c.ny, ny), set(c.grading, grading), set(c.delta, delta), set(c.near_arc_width, band);
    set(c.mach_cap, cap), set(c.outer_tol, outer_tol), set(c.outer_max_iter, outer_max_iter), set(c.lambda, lambda);
    set(c.inner_tol, inner_tol), set(c.inner_max_iter, inner_max_iter), set(c.inner, inner);
    set(c.sweep, sweep), set(c.lo, lo), set(c.hi, hi), set(c.samples, samples);
    c.validate();
    return c;
  }
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) std::cout << text;
  else write_text(out, text);
}

int cmd_solve(const RunConfig& c, const std::filesystem::path& dir, bool snapshots) {
  std::filesystem::create_directories(dir);
  write_text(dir / "config.json", to_json(c).dump(2) + "\n");
  SolveConfig sc = c.solve_config();
  if (snapshots)
    sc.observer = [&](int outer, const InnerReport& rep, const Grid2D& g, const std::vector<double>& psi) {
      std::string s = "i,xi,eta,psi\n";
      for (int i = 0; i <= g.nx; ++i)
        s += std::to_string(i) + "," + fmt(g.at(i, g.ny)[0]) + "," + fmt(g.at(i, g.ny)[1]) + "," +
             fmt(psi[g.idx(i, g.ny)]) + "\n";
      char name[64];
      std::snprintf(name, sizeof name, "outer_%03d.csv", outer);
      write_text(dir / "snapshots" / name, s);
      std::fprintf(stderr, "outer %d: %d inner iterations, change %.3e\n", outer, rep.iterations, rep.last_change);
    };
  try {
    const Solution s = solve(c.gas(), c.resolved_rho1(), c.theta_w(), sc);
    write_text(dir / "fields.csv", fields_csv(s));
    write_text(dir / "shock.csv", shock_csv(s, c.near_arc_width));
    write_text(dir / "report.json", to_json(s.report).dump(2) + "\n");
    write_text(dir / "timing.json", json{{"wall_seconds", s.report.wall_seconds}}.dump(2) + "\n");
    std::fprintf(stderr, "solve: %s after %zu outer iterations (%.2f s), %s\n",
                 s.report.converged ? "converged" : "not converged", s.report.history.size(), s.report.wall_seconds,
                 s.report.verified ? "verified" : "NOT verified");
    return s.report.verified ? 0 : 3;
  } catch (const RegimeError& e) {
    write_text(dir / "report.json", json{{"converged", false}, {"error", e.what()}, {"kind", "regime"}}.dump(2) + "\n");
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const NonconvergenceError& e) {
    write_text(dir / "report.json",
               json{{"converged", false}, {"error", e.what()}, {"kind", "nonconvergence"}, {"displacements", e.history}}
                       .dump(2) +
                   "\n");
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
}

int cmd_verify(const std::filesystem::path& dir) {
  try {
    const Artifact a = load_artifact(dir);
    const auto d = diagnose(a.ctx, a.grid, a.psi, a.cfg.solve_config().cutoff);
    std::cout << to_json(d).dump(2) << "\n";
    return d.verified() ? 0 : 1;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "verify: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regular shock reflection-diffraction in self-similar potential flow"};
  app.require_subcommand(1);
  Flags f;
  std::string out, out_dir = "out";
  bool snapshots = false;

  auto* local = app.add_subcommand("local", "local states and transition angles as JSON");
  f.add_gas(local);
  local->add_option("--theta-w", f.theta_w, "wedge angle in degrees, (0, 90]");
  local->add_option("--out", out, "output file (default: stdout)");

  auto* curves = app.add_subcommand("curves", "detachment and sonic angles over a parameter sweep (CSV)");
  f.add_gas(curves);
  f.add_sweep(curves);
  curves->add_option("--out", out, "output file (default: stdout)");

  auto* solvec = app.add_subcommand("solve", "solve the free-boundary problem; writes an artifact directory");
  f.add_gas(solvec);
  f.add_solve(solvec);
  solvec->add_option("--out", out_dir, "output directory (default: out)");
  solvec->add_flag("--snapshots", snapshots, "write the shock after every outer iteration");

  std::string dir;
  auto* verify = app.add_subcommand("verify", "re-run the diagnostics on an artifact directory");
  verify->add_option("dir", dir, "artifact directory")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*verify) return cmd_verify(dir);
    const RunConfig c = f.resolve();
    if (*local) {
      emit(local_report(c).dump(2) + "\n", out);
    } else if (*curves) {
      const auto kind = c.sweep == "m1" ? SweepParameter::m1 : SweepParameter::rho1;
      emit(curves_csv(transition_curve(c.gas(), kind, c.lo, c.hi, c.samples)), out);
    } else if (*solvec) {
      return cmd_solve(c, out_dir, snapshots);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
