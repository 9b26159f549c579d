#include "srd/elliptic_core.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

namespace srd {

void CutoffConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("CutoffConfig: delta must lie in (0, 1)");
  if (!(near_arc_width > 0.0)) throw std::invalid_argument("CutoffConfig: near_arc_width must be positive");
  if (!(knee > 0.0 && knee < 1.0)) throw std::invalid_argument("CutoffConfig: knee must lie in (0, 1)");
  if (!(global_mach_cap > 0.0 && global_mach_cap <= 1.0))
    throw std::invalid_argument("CutoffConfig: global_mach_cap must lie in (0, 1]");
}

FlowContext make_context(const PotentialIncident& pot, const StateTwo& s2) {
  return {pot, s2, build_geometry(pot, s2)};
}

namespace {

double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

// v limited to [-L, L]; the smooth variant is C^1 with a quadratic knee of
// half-width w = knee L around |v| = L.
double limit(double v, double L, bool smooth, double knee, bool& active) {
  const double a = std::abs(v);
  if (!smooth) {
    active = a > L;
    return active ? std::copysign(L, v) : v;
  }
  const double w = knee * L;
  active = a > L - w;
  if (!active) return v;
  if (a >= L + w) return std::copysign(L, v);
  const double t = a - (L - w);
  return std::copysign(a - t * t / (4 * w), v);
}

double min_eig(const double A[2][2]) {
  const double m = 0.5 * (A[0][0] + A[1][1]), d = 0.5 * (A[0][0] - A[1][1]);
  return m - std::sqrt(d * d + A[0][1] * A[0][1]);
}

struct Row {
  int n = 0;
  int col[12];
  double val[12];
  double rhs = 0;
  void add(int c, double v) {
    for (int k = 0; k < n; ++k)
      if (col[k] == c) {
        val[k] += v;
        return;
      }
    col[n] = c, val[n] = v, ++n;
  }
  void scale(double s) {
    for (int k = 0; k < n; ++k) val[k] *= s;
    rhs *= s;
  }
};

// First-derivative stencil (one-sided at the ends) along one logical direction.
void d1(int k, int n, double h, int& k0, double w[3]) {
  if (k == 0) {
    k0 = 0, w[0] = -1.5 / h, w[1] = 2 / h, w[2] = -0.5 / h;
  } else if (k == n) {
    k0 = n - 2, w[0] = 0.5 / h, w[1] = -2 / h, w[2] = 1.5 / h;
  } else {
    k0 = k - 1, w[0] = -0.5 / h, w[1] = 0, w[2] = 0.5 / h;
  }
}

// Row entries of nu . grad psi at node (i, j).
void add_directional(const Grid2D& g, int i, int j, const Vec2& nu, double scale, Row& row) {
  const auto& m = g.metric[g.idx(i, j)];
  const double cX = m.Jinv[0][0] * nu[0] + m.Jinv[0][1] * nu[1];
  const double cY = m.Jinv[1][0] * nu[0] + m.Jinv[1][1] * nu[1];
  int k0;
  double w[3];
  d1(i, g.nx, g.hX, k0, w);
  for (int q = 0; q < 3; ++q)
    if (w[q] != 0.0) row.add(g.idx(k0 + q, j), scale * cX * w[q]);
  d1(j, g.ny, g.hY, k0, w);
  for (int q = 0; q < 3; ++q)
    if (w[q] != 0.0) row.add(g.idx(i, k0 + q), scale * cY * w[q]);
}

struct RowFlags {
  bool interior = false, clamped = false, floored = false, capped = false;
  double min_coeff = std::numeric_limits<double>::infinity();
};

Row build_row(const FlowContext& ctx, const Grid2D& g, const std::vector<double>& psi, const CutoffConfig& cfg,
              const Manufactured* mms, int i, int j, RowFlags& fl) {
  Row row;
  const int r = g.idx(i, j);
  const Vec2& p = g.p[r];
  const int nx = g.nx, ny = g.ny;
  const auto& s2 = ctx.s2;
  if (i == 0) {
    row.add(r, 1.0);
    row.rhs = mms ? mms->value(p) : 0.0;
    return row;
  }
  if (i < nx && j > 0 && j < ny) {
    fl.interior = true;
    const auto& m = g.metric[r];
    const Vec2 gp = g.grad(psi, i, j);
    const auto co = coefficients(ctx, cfg, p, psi[r], gp);
    fl.clamped = co.clamped, fl.floored = co.floored, fl.capped = co.capped;
    fl.min_coeff = min_eig(co.A);
    double B[2][2];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double s = 0;
        for (int u = 0; u < 2; ++u)
          for (int v = 0; v < 2; ++v) s += m.Jinv[a][u] * co.A[u][v] * m.Jinv[b][v];
        B[a][b] = s;
      }
    double sk[2];
    for (int k = 0; k < 2; ++k) sk[k] = B[0][0] * m.D2[k][0] + 2 * B[0][1] * m.D2[k][1] + B[1][1] * m.D2[k][2];
    const double cX = m.Jinv[0][0] * sk[0] + m.Jinv[0][1] * sk[1];
    const double cY = m.Jinv[1][0] * sk[0] + m.Jinv[1][1] * sk[1];
    const double hX = g.hX, hY = g.hY;
    // Second-difference weights raised to sqrt(w^2 + (a/2h)^2) >= |a|/2h so the
    // neighbour weights stay non-negative where the radial coefficient degenerates
    // next to the sonic arc (mesh Peclet number > 1); smooth, and second order
    // wherever diffusion dominates.
    double cxx = B[0][0] / (hX * hX), cyy = B[1][1] / (hY * hY);
    if (cfg.stabilize) {
      cxx = std::hypot(cxx, cX / (2 * hX));
      cyy = std::hypot(cyy, cY / (2 * hY));
    }
    const double cxy = 2 * B[0][1] / (4 * hX * hY);
    row.add(r, -2 * cxx - 2 * cyy);
    row.add(g.idx(i + 1, j), cxx - cX / (2 * hX));
    row.add(g.idx(i - 1, j), cxx + cX / (2 * hX));
    row.add(g.idx(i, j + 1), cyy - cY / (2 * hY));
    row.add(g.idx(i, j - 1), cyy + cY / (2 * hY));
    row.add(g.idx(i + 1, j + 1), cxy);
    row.add(g.idx(i - 1, j - 1), cxy);
    row.add(g.idx(i + 1, j - 1), -cxy);
    row.add(g.idx(i - 1, j + 1), -cxy);
    row.rhs = mms ? mms->source(p, psi[r]) : 0.0;
    row.scale(1.0 / std::abs(row.val[0]));
    return row;
  }
  if (mms && (j == ny || i == nx || (j == 0 && mms->dirichlet_wedge))) {
    row.add(r, 1.0);
    row.rhs = mms->value(p);
    return row;
  }
  const double tw = ctx.geo.theta_w;
  const Vec2 nu_w{std::sin(tw), -std::cos(tw)};
  if (j == 0 && i < nx) {
    add_directional(g, i, j, nu_w, 1.0, row);
    return row;
  }
  if (i == nx && j == 0) {
    // corner P3: averaged normal of wedge and symmetry line
    Vec2 nu{nu_w[0], nu_w[1] - 1.0};
    const double n = std::hypot(nu[0], nu[1]);
    nu = {nu[0] / n, nu[1] / n};
    add_directional(g, i, j, nu, 1.0, row);
    row.rhs = s2.v2 / n;
    return row;
  }
  if (i == nx) {
    add_directional(g, i, j, {0.0, -1.0}, 1.0, row);
    row.rhs = s2.v2;
    return row;
  }
  // shock: [rho grad phi . nu] = 0, Newton-linearized about psi
  const Vec2 nu = shock_normal(g, i);
  const Vec2 gp = g.grad(psi, i, j);
  const Vec2 R{p[0] - s2.u2, p[1] - s2.v2};
  const Vec2 gphi{-R[0] + gp[0], -R[1] + gp[1]};
  const double gm = ctx.pot.gas.gamma - 1.0;
  const double c2l = s2.c2 * s2.c2 - gm * (psi[r] - dot(R, gp) + 0.5 * dot(gp, gp));
  if (!(c2l > 0.0)) throw CavitationError("assemble: vacuum at a shock node");
  const double rho = std::pow(c2l, 1.0 / gm);
  const double gn = dot(gphi, nu);
  const Vec2 g1{ctx.pot.u1 - p[0], -p[1]};
  const double F = rho * gn - ctx.pot.rho1 * dot(g1, nu);
  const Vec2 bvec{rho * (nu[0] - gn * gphi[0] / c2l), rho * (nu[1] - gn * gphi[1] / c2l)};
  const double c0 = -rho * gn / c2l;
  add_directional(g, i, j, bvec, 1.0, row);
  row.add(r, c0);
  row.rhs = -F + dot(bvec, gp) + c0 * psi[r];
  return row;
}

double local_density(const FlowContext& ctx, const Vec2& p, double psi, const Vec2& gp) {
  const Vec2 R{p[0] - ctx.s2.u2, p[1] - ctx.s2.v2};
  const double gm = ctx.pot.gas.gamma - 1.0;
  const double c2l = ctx.s2.c2 * ctx.s2.c2 - gm * (psi - dot(R, gp) + 0.5 * dot(gp, gp));
  if (!(c2l > 0.0)) throw CavitationError("local_density: vacuum");
  return std::pow(c2l, 1.0 / gm);
}

// Runs fn(r) for r in [0, n); an exception thrown by any row is rethrown after
// the loop (the one of the lowest row, so the outcome is deterministic).
template <class Fn>
void for_rows(int n, Exec exec, Fn fn) {
  std::vector<std::exception_ptr> err(n);
  bool failed = false;
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) reduction(|| : failed)
    for (int r = 0; r < n; ++r) {
      try {
        fn(r);
      } catch (...) {
        err[r] = std::current_exception(), failed = true;
      }
    }
  } else {
    for (int r = 0; r < n; ++r) fn(r);
  }
  if (failed)
    for (auto& e : err)
      if (e) std::rethrow_exception(e);
}

}  // namespace

Vec2 shock_normal(const Grid2D& g, int i) {
  const int j = g.ny;
  const auto& m = g.metric[g.idx(i, j)];
  Vec2 nu{m.J[1][0], -m.J[0][0]};
  const double nn = std::hypot(nu[0], nu[1]);
  nu = {nu[0] / nn, nu[1] / nn};
  const Vec2& p = g.at(i, j);
  const Vec2& pin = g.at(i, j - 1);
  if (nu[0] * (p[0] - pin[0]) + nu[1] * (p[1] - pin[1]) < 0) nu = {-nu[0], -nu[1]};
  return nu;
}

double ShockResiduals::max_mismatch() const {
  double m = 0;
  for (double v : mismatch) m = std::max(m, std::abs(v));
  return m;
}

double ShockResiduals::max_flux() const {
  double m = 0;
  for (double v : flux) m = std::max(m, std::abs(v));
  return m;
}

ShockResiduals shock_residuals(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi) {
  ShockResiduals out;
  for (int i = 1; i <= grid.nx; ++i) {
    const int r = grid.idx(i, grid.ny);
    const Vec2& p = grid.p[r];
    const Vec2 gp = grid.grad(psi, i, grid.ny);
    const auto f2 = phi2(ctx.pot, ctx.s2, p);
    const auto f1 = phi1(ctx.pot, p);
    const Vec2 gphi{f2.grad[0] + gp[0], f2.grad[1] + gp[1]};
    const Vec2 nu = shock_normal(grid, i);
    out.mismatch.push_back(f2.phi + psi[r] - f1.phi);
    out.flux.push_back(local_density(ctx, p, psi[r], gp) * dot(gphi, nu) - ctx.pot.rho1 * dot(f1.grad, nu));
  }
  return out;
}

Coefficients coefficients(const FlowContext& ctx, const CutoffConfig& cfg, const Vec2& p, double psi,
                          const Vec2& grad_psi) {
  Coefficients co;
  const auto& s2 = ctx.s2;
  const double gam = ctx.pot.gas.gamma, gm = gam - 1.0;
  const Vec2 R{p[0] - s2.u2, p[1] - s2.v2};
  const double r = std::hypot(R[0], R[1]);
  const Vec2 er{R[0] / r, R[1] / r};
  const double x = s2.c2 - r;
  Vec2 gp = grad_psi;
  const bool band = x < cfg.near_arc_width * s2.c2;
  if (band) {
    // psi_x = -grad psi . e_r
    const double psix = -dot(gp, er);
    const double lim = (2 - cfg.delta) * std::max(x, 0.0) / (gam + 1);
    const double psic = limit(psix, lim, cfg.smooth, cfg.knee, co.clamped);
    gp = {gp[0] + (psix - psic) * er[0], gp[1] + (psix - psic) * er[1]};
  }
  Vec2 gphi{-R[0] + gp[0], -R[1] + gp[1]};
  double c2l = s2.c2 * s2.c2 - gm * (psi - dot(R, gp) + 0.5 * dot(gp, gp));
  if (!band) {
    // rho0^(g-1) - (g-1) phi = c2^2 + (g-1)(|R|^2/2 - psi)
    const double cs2 = 2.0 / (gam + 1) * (s2.c2 * s2.c2 + gm * (0.5 * r * r - psi));
    const double q = std::hypot(gphi[0], gphi[1]);
    const double cap = cfg.global_mach_cap * std::sqrt(std::max(cs2, 0.0));
    const double qc = limit(q, cap, cfg.smooth, cfg.knee, co.capped);
    if (co.capped && q > 0.0) {
      gphi = {gphi[0] * qc / q, gphi[1] * qc / q};
      // keep c^2 on the Bernoulli law at the capped speed
      c2l = s2.c2 * s2.c2 + gm * (0.5 * r * r - psi) - 0.5 * gm * qc * qc;
    }
  }
  co.A[0][0] = c2l - gphi[0] * gphi[0];
  co.A[0][1] = co.A[1][0] = -gphi[0] * gphi[1];
  co.A[1][1] = c2l - gphi[1] * gphi[1];
  if (band) {
    const double arr = er[0] * er[0] * co.A[0][0] + 2 * er[0] * er[1] * co.A[0][1] + er[1] * er[1] * co.A[1][1];
    const double floor = 0.5 * cfg.delta * s2.c2 * std::max(x, 0.0);
    // arr -> floor + max(arr - floor, 0), with the same C^1 knee as the clamp
    const double u = arr - floor, w = cfg.knee * floor;
    double eff = arr;
    if (!cfg.smooth) {
      eff = std::max(arr, floor);
    } else if (u < w) {
      eff = u <= -w ? floor : floor + (u + w) * (u + w) / (4 * w);
    }
    if (eff != arr) {
      const double d = eff - arr;
      co.A[0][0] += d * er[0] * er[0];
      co.A[0][1] += d * er[0] * er[1];
      co.A[1][0] += d * er[0] * er[1];
      co.A[1][1] += d * er[1] * er[1];
      co.floored = true;
    }
  }
  return co;
}

LinearSystem assemble(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi,
                      const CutoffConfig& cfg, Exec exec, const Manufactured* mms) {
  const int N = int(grid.size());
  std::vector<Row> rows(N);
  std::vector<RowFlags> flags(N);
  for_rows(N, exec, [&](int r) {
    rows[r] = build_row(ctx, grid, psi, cfg, mms, r / (grid.ny + 1), r % (grid.ny + 1), flags[r]);
  });
  LinearSystem sys;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(N) * 9);
  sys.b.resize(N);
  sys.stats.min_coefficient = std::numeric_limits<double>::infinity();
  for (int r = 0; r < N; ++r) {
    for (int k = 0; k < rows[r].n; ++k) trip.emplace_back(r, rows[r].col[k], rows[r].val[k]);
    sys.b[r] = rows[r].rhs;
    const auto& f = flags[r];
    if (!f.interior) continue;
    ++sys.stats.interior;
    sys.stats.band_clamped += f.clamped;
    sys.stats.floored += f.floored;
    sys.stats.capped += f.capped;
    sys.stats.min_coefficient = std::min(sys.stats.min_coefficient, f.min_coeff);
  }
  sys.A.resize(N, N);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.A.makeCompressed();
  return sys;
}

Eigen::VectorXd residual(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi,
                         const CutoffConfig& cfg, Exec exec, const Manufactured* mms) {
  const int N = int(grid.size());
  Eigen::VectorXd F(N);
  auto one = [&](int r) {
    RowFlags fl;
    const Row row = build_row(ctx, grid, psi, cfg, mms, r / (grid.ny + 1), r % (grid.ny + 1), fl);
    double s = -row.rhs;
    for (int k = 0; k < row.n; ++k) s += row.val[k] * psi[row.col[k]];
    F[r] = s;
  };
  for_rows(N, exec, one);
  return F;
}

Eigen::SparseMatrix<double> jacobian(const FlowContext& ctx, const Grid2D& grid, const std::vector<double>& psi,
                                     const Eigen::VectorXd& F, const CutoffConfig& cfg, Exec exec,
                                     const Manufactured* mms) {
  const int nx = grid.nx, ny = grid.ny, N = int(grid.size());
  // nodes with equal (i mod 3, j mod 3) never share a row window
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(N) * 9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      std::vector<double> q = psi;
      std::vector<double> eps(N, 0.0);
      for (int i = a; i <= nx; i += 3)
        for (int j = b; j <= ny; j += 3) {
          const int k = grid.idx(i, j);
          eps[k] = 1e-7 * std::max(1e-2, std::abs(psi[k]));
          q[k] += eps[k];
        }
      const Eigen::VectorXd Fp = residual(ctx, grid, q, cfg, exec, mms);
      for (int r = 0; r < N; ++r) {
        const int i = r / (ny + 1), j = r % (ny + 1);
        const int i0 = std::clamp(i - 1, 0, nx - 2), j0 = std::clamp(j - 1, 0, ny - 2);
        const int ic = i0 + ((a - i0) % 3 + 3) % 3, jc = j0 + ((b - j0) % 3 + 3) % 3;
        const int c = grid.idx(ic, jc);
        trip.emplace_back(r, c, (Fp[r] - F[r]) / eps[c]);
      }
    }
  Eigen::SparseMatrix<double> J(N, N);
  J.setFromTriplets(trip.begin(), trip.end());
  J.makeCompressed();
  return J;
}

namespace {

std::vector<double> newton_solve(const FlowContext& ctx, const Grid2D& grid, std::vector<double> psi,
                                 const CutoffConfig& cfg, const PicardConfig& pc, InnerReport& rep, Exec exec,
                                 const Manufactured* mms) {
  const int N = int(grid.size());
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  Eigen::VectorXd F = residual(ctx, grid, psi, cfg, exec, mms);
  int growth = 0;
  for (int it = 1; it <= pc.max_iter; ++it) {
    const Eigen::SparseMatrix<double> J = jacobian(ctx, grid, psi, F, cfg, exec, mms);
    if (!analyzed) lu.analyzePattern(J), analyzed = true;
    lu.factorize(J);
    if (lu.info() != Eigen::Success) throw NonconvergenceError("picard_solve: singular Jacobian", rep.history);
    Eigen::VectorXd d = lu.solve(-F);
    const double bn = std::max(F.norm(), 1e-300);
    double rel = (J * d + F).norm() / bn;
    for (int k = 0; k < 3 && rel > pc.linear_rtol; ++k) {
      d += lu.solve(-F - J * d);
      rel = (J * d + F).norm() / bn;
    }
    rep.linear_residual = std::max(rep.linear_residual, rel);
    if (!d.allFinite()) throw NonconvergenceError("picard_solve: non-finite iterate", rep.history);
    const double step = d.lpNorm<Eigen::Infinity>();
    // backtracking on the max-norm residual
    const double f0 = F.lpNorm<Eigen::Infinity>();
    double t = 1.0;
    std::vector<double> q(psi.size());
    Eigen::VectorXd Fq;
    for (;;) {
      for (int k = 0; k < N; ++k) q[k] = psi[k] + t * d[k];
      bool ok = true;
      try {
        Fq = residual(ctx, grid, q, cfg, exec, mms);
      } catch (const CavitationError&) {
        ok = false;
      }
      if (ok && (Fq.lpNorm<Eigen::Infinity>() <= (1 - 1e-4 * t) * f0 || t <= pc.min_damping)) break;
      if (!ok && t <= pc.min_damping) throw NonconvergenceError("picard_solve: vacuum along the Newton step", rep.history);
      t *= 0.5;
    }
    psi.swap(q);
    F = std::move(Fq);
    const double prev = rep.history.empty() ? std::numeric_limits<double>::infinity() : rep.history.back();
    growth = step > prev * (1 + 1e-3) ? growth + 1 : 0;
    rep.history.push_back(step);
    rep.iterations = it;
    rep.last_change = t * step;
    rep.damping = t;
    if (step < pc.tol) break;
    if (growth >= 3) throw NonconvergenceError("picard_solve: iterates growing", rep.history);
  }
  rep.stats = assemble(ctx, grid, psi, cfg, exec, mms).stats;
  return psi;
}

}  // namespace

std::vector<double> picard_solve(const FlowContext& ctx, const Grid2D& grid, std::vector<double> psi,
                                 const CutoffConfig& cfg, const PicardConfig& pc, InnerReport& rep, Exec exec,
                                 const Manufactured* mms) {
  cfg.validate();
  rep = InnerReport{};
  if (pc.method == InnerMethod::newton) {
    // Newton can stall where the first column next to the sonic arc is nearly
    // decoupled; damped Picard from the same start is the fallback.
    try {
      auto out = newton_solve(ctx, grid, psi, cfg, pc, rep, exec, mms);
      if (rep.last_change < pc.tol) return out;
    } catch (const NonconvergenceError&) {
    } catch (const CavitationError&) {
    }
    const int newton_iterations = rep.iterations;
    rep = InnerReport{};
    rep.fallback = true;
    auto out = picard_solve(ctx, grid, std::move(psi), cfg, pc.with(InnerMethod::picard), rep, exec, mms);
    rep.iterations += newton_iterations;
    rep.fallback = true;
    return out;
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  int growth = 0;
  double omega = 1.0;
  for (int it = 1; it <= pc.max_iter; ++it) {
    auto sys = assemble(ctx, grid, psi, cfg, exec, mms);
    if (!analyzed) lu.analyzePattern(sys.A), analyzed = true;
    lu.factorize(sys.A);
    if (lu.info() != Eigen::Success) throw NonconvergenceError("picard_solve: singular linear system", rep.history);
    Eigen::VectorXd x = lu.solve(sys.b);
    const double bn = std::max(sys.b.norm(), 1e-300);
    double rel = (sys.A * x - sys.b).norm() / bn;
    for (int k = 0; k < 3 && rel > pc.linear_rtol; ++k) {
      x += lu.solve(sys.b - sys.A * x);
      rel = (sys.A * x - sys.b).norm() / bn;
    }
    rep.linear_residual = std::max(rep.linear_residual, rel);
    // Damped update: the frozen-coefficient map can settle into a 2-cycle when
    // the cutoffs switch; the step is halved whenever the change grows and
    // recovers while it contracts.
    double change = 0;
    for (std::size_t k = 0; k < psi.size(); ++k) {
      if (!std::isfinite(x[k])) throw NonconvergenceError("picard_solve: non-finite iterate", rep.history);
      change = std::max(change, std::abs(x[k] - psi[k]));
    }
    // change is the undamped step, so convergence is not faked by damping
    const double prev = rep.history.empty() ? std::numeric_limits<double>::infinity() : rep.history.back();
    if (change > prev) omega = std::max(0.5 * omega, pc.min_damping);
    else if (change < 0.5 * prev) omega = std::min(1.5 * omega, 1.0);
    for (std::size_t k = 0; k < psi.size(); ++k) psi[k] += omega * (x[k] - psi[k]);
    growth = change > prev * (1 + 1e-3) ? growth + 1 : 0;
    rep.history.push_back(change);
    rep.iterations = it;
    rep.last_change = change;
    rep.stats = sys.stats;
    rep.damping = omega;
    if (change < pc.tol) return psi;
    if (growth >= 3) throw NonconvergenceError("picard_solve: iterates growing", rep.history);
  }
  return psi;
}

}  // namespace srd
