#include "srd/free_boundary.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace srd {

void SolveConfig::validate() const {
  if (grid.nx < 4 || grid.ny < 4) throw std::invalid_argument("SolveConfig: grid needs at least 4 cells per direction");
  if (!(grid.grading > 0.0)) throw std::invalid_argument("SolveConfig: grading must be positive");
  if (!(outer_tol > 0.0)) throw std::invalid_argument("SolveConfig: outer_tol must be positive");
  if (outer_max_iter < 1) throw std::invalid_argument("SolveConfig: outer_max_iter must be >= 1");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("SolveConfig: lambda must lie in (0, 1]");
  if (!(lambda_min > 0.0 && lambda_min <= lambda))
    throw std::invalid_argument("SolveConfig: lambda_min must lie in (0, lambda]");
  if (!(picard.tol > 0.0) || picard.max_iter < 1) throw std::invalid_argument("SolveConfig: bad inner settings");
  cutoff.validate();
}

double Solution::phi(std::size_t k) const { return phi2(ctx.pot, ctx.s2, grid.p[k]).phi + psi[k]; }

ShockCurve initial_shock(const WedgeGeometry& geo) {
  const Vec2 t = geo.s1_down;
  const Vec2 p1 = geo.p1;
  const double slope = t[0] / t[1];
  constexpr int n = 200;
  std::vector<double> eta(n + 1), xi(n + 1);
  const Vec2 nrm{t[1], -t[0]};
  const bool vertical = std::abs(nrm[1]) < 1e-12;
  const double a = vertical ? 0.0 : -p1[1] / nrm[1];
  const Vec2 cen{p1[0] + a * nrm[0], 0.0};
  const double R = std::abs(a);
  const double sg = p1[0] >= cen[0] ? 1.0 : -1.0;
  for (int k = 0; k <= n; ++k) {
    const double e = p1[1] * k / n;
    eta[k] = e;
    // xi = xi(P1) + sg (sqrt(R^2 - e^2) - sqrt(R^2 - eta1^2)), cancellation-free
    xi[k] = vertical ? p1[0]
                     : p1[0] + sg * (p1[1] * p1[1] - e * e) /
                                   (std::sqrt(R * R - p1[1] * p1[1]) + std::sqrt(R * R - e * e));
  }
  eta[n] = p1[1], xi[n] = p1[0];
  const double foot = xi[0];
  const double s1_foot_xi = p1[0] - slope * p1[1];
  if (!vertical && !(foot < geo.p3[0] && foot > s1_foot_xi))
    throw GeometryError("initial_shock: arc does not reach {eta = 0} between the wedge and S1");
  return ShockCurve(std::move(eta), std::move(xi), slope);
}

ShockUpdate update_shock(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi, double lambda,
                         double omega) {
  const int nx = grid.nx, ny = grid.ny;
  std::vector<double> d(nx + 1, 0.0);
  std::vector<Vec2> nus(nx + 1);
  for (int i = 1; i <= nx; ++i) {
    const Vec2& p = grid.at(i, ny);
    const Vec2 nu = shock_normal(grid, i);
    const Vec2 gp = grid.grad(psi, i, ny);
    const auto f2 = phi2(ctx.pot, ctx.s2, p);
    const auto f1 = phi1(ctx.pot, p);
    const double diff = f2.phi + psi[grid.idx(i, ny)] - f1.phi;
    const double dn = (f2.grad[0] + gp[0] - f1.grad[0]) * nu[0] + (f2.grad[1] + gp[1] - f1.grad[1]) * nu[1];
    if (std::abs(dn) < 1e-12) throw DegenerateUpdateError("update_shock: vanishing normal derivative of phi - phi1");
    d[i] = -diff / dn;
    nus[i] = nu;
  }
  // (1, 4, 1)/6 filter: damps the sawtooth mode 3x, invertible, so fixed points
  // are unchanged; P1 pinned, mirror symmetry about {eta = 0} at P2
  std::vector<double> fd(nx + 1, 0.0);
  for (int i = 1; i < nx; ++i) fd[i] = (d[i - 1] + 4 * d[i] + d[i + 1]) / 6;
  fd[nx] = (2 * d[nx - 1] + 4 * d[nx]) / 6;
  std::vector<Vec2> pts;
  pts.reserve(nx + 1);
  pts.push_back(ctx.geo.p1);
  ShockUpdate out;
  for (int i = 1; i <= nx; ++i) {
    const Vec2& p = grid.at(i, ny);
    const double s = lambda * fd[i];
    Vec2 q{p[0] + s * nus[i][0], p[1] + s * nus[i][1]};
    if (i == nx) q[1] = 0.0;
    out.displacement = std::max(out.displacement, std::abs(s));
    pts.push_back(q);
  }
  // near-arc slope dy/dx of the new curve in (x, y) coordinates
  const auto nsc = near_sonic_coords(ctx.geo);
  for (int i = 0; i < nx; ++i) {
    const Vec2 a = nsc.to_xy(pts[i]), b = nsc.to_xy(pts[i + 1]);
    if (b[0] > ctx.s2.c2 * 0.2) break;
    if (b[0] - a[0] > 0.0 && (b[1] - a[1]) / (b[0] - a[0]) < omega) out.omega_violated = true;
  }
  std::sort(pts.begin(), pts.end(), [](const Vec2& u, const Vec2& v) { return u[1] < v[1]; });
  std::vector<double> eta, xi;
  for (const auto& q : pts) {
    if (!eta.empty() && q[1] - eta.back() < 1e-12 * ctx.s2.c2) continue;
    eta.push_back(q[1]);
    xi.push_back(q[0]);
  }
  if (eta.back() != ctx.geo.p1[1]) eta.back() = ctx.geo.p1[1], xi.back() = ctx.geo.p1[0];
  out.shock = ShockCurve(std::move(eta), std::move(xi), ctx.geo.s1_down[0] / ctx.geo.s1_down[1]);
  return out;
}

Solution solve(const GasParams& gas, double rho1, double theta_w, const SolveConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  gas.validate();
  cfg.validate();
  const auto pot = potential_incident(gas, rho1);
  const bool normal = std::abs(theta_w - kPi / 2) < 1e-12;
  if (!normal) {
    const double ts = sonic_angle(pot);
    if (!(theta_w > ts && theta_w < kPi / 2))
      throw RegimeError("solve: theta_w must lie in (theta_s, 90] deg with theta_s = " +
                        std::to_string(ts * 180 / kPi) + " deg");
  }
  Solution sol;
  sol.cfg = cfg;
  sol.ctx = make_context(pot, normal ? normal_state_two(pot) : state_two_a(pot, theta_w));
  sol.shock = initial_shock(sol.ctx.geo);
  const std::size_t n = std::size_t(cfg.grid.nx + 1) * (cfg.grid.ny + 1);
  sol.psi.assign(n, 0.0);
  auto& rep = sol.report;
  auto finish = [&] {
    rep.diagnostics = diagnose(sol.ctx, sol.grid, sol.psi, cfg.cutoff);
    rep.verified = rep.converged && rep.diagnostics.verified();
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  if (normal) {
    sol.grid = build_grid(sol.ctx.geo, sol.shock, cfg.grid);
    rep.analytic = rep.converged = true;
    finish();
    return sol;
  }
  double lam = cfg.lambda, prev = std::numeric_limits<double>::infinity();
  auto displacements = [&] {
    std::vector<double> h;
    for (const auto& r : rep.history) h.push_back(r.displacement);
    return h;
  };
  // last accepted inner solution, for backing off a failed shock step
  Grid2D good_grid;
  std::vector<double> good_psi;
  for (int it = 0; it < cfg.outer_max_iter; ++it) {
    sol.grid = build_grid(sol.ctx.geo, sol.shock, cfg.grid);
    InnerReport inner;
    std::string failure;
    try {
      auto next = picard_solve(sol.ctx, sol.grid, sol.psi, cfg.cutoff, cfg.picard, inner, cfg.exec);
      if (inner.last_change < cfg.picard.tol) sol.psi = std::move(next);
      else failure = "inner iteration did not converge";
    } catch (const NonconvergenceError& e) {
      failure = e.what();
    } catch (const CavitationError& e) {
      failure = e.what();
    }
    if (!failure.empty()) {
      if (good_psi.empty() || lam <= cfg.lambda_min)
        throw NonconvergenceError("solve: " + failure + " (outer iteration " + std::to_string(it) + ")",
                                  displacements());
      // retry the last shock step with half the relaxation
      lam = std::max(0.5 * lam, cfg.lambda_min);
      sol.shock = update_shock(sol.ctx, good_grid, good_psi, lam, cfg.omega).shock;
      sol.psi = good_psi;
      ++rep.backoffs;
      continue;
    }
    if (cfg.observer) cfg.observer(it, inner, sol.grid, sol.psi);
    auto upd = update_shock(sol.ctx, sol.grid, sol.psi, lam, cfg.omega);
    const double step = upd.displacement / lam;  // unrelaxed
    if (step > 1.1 * prev && lam > cfg.lambda_min) {
      lam = std::max(0.5 * lam, cfg.lambda_min);
      upd = update_shock(sol.ctx, sol.grid, sol.psi, lam, cfg.omega);
    } else if (step < 0.8 * prev && lam < cfg.lambda) {
      lam = std::min(1.25 * lam, cfg.lambda);
      upd = update_shock(sol.ctx, sol.grid, sol.psi, lam, cfg.omega);
    }
    prev = step;
    const auto res = shock_residuals(sol.ctx, sol.grid, sol.psi);
    rep.history.push_back({upd.displacement, res.max_mismatch(), res.max_flux(), inner.iterations, lam});
    rep.omega_violations += upd.omega_violated;
    rep.stats = inner.stats;
    // stop on the unrelaxed step so that a small lambda cannot fake convergence
    if (step < cfg.outer_tol * sol.ctx.s2.c2) {
      rep.converged = true;
      finish();
      return sol;
    }
    good_grid = sol.grid;
    good_psi = sol.psi;
    sol.shock = std::move(upd.shock);
  }
  throw NonconvergenceError("solve: shock displacement above tolerance after " +
                                std::to_string(cfg.outer_max_iter) + " outer iterations",
                            displacements());
}

}  // namespace srd
