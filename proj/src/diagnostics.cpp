#include "srd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace srd {

namespace {

double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

std::string at(int i, int j) { return "(" + std::to_string(i) + ", " + std::to_string(j) + ")"; }

Vec2 grad_phi(const FlowContext& ctx, const Vec2& p, const Vec2& gp) {
  const auto f2 = phi2(ctx.pot, ctx.s2, p);
  return {f2.grad[0] + gp[0], f2.grad[1] + gp[1]};
}

// x = c2 - |p - C|; defined at the sonic center too (x = c2).
double x_of(const FlowContext& ctx, const Vec2& p) {
  return ctx.s2.c2 - std::hypot(p[0] - ctx.s2.u2, p[1] - ctx.s2.v2);
}

// Columns with x < width * c2 (x measured at the wedge end of each column).
int band_columns(const FlowContext& ctx, const Grid2D& g, double width) {
  int n = 0;
  for (int i = 1; i <= g.nx; ++i)
    if (x_of(ctx, g.at(i, 0)) < width * ctx.s2.c2) ++n;
  return n;
}

// Quadratic Lagrange interpolation through three points: value, first and
// second derivative at t.
struct Quad {
  double v, d1, d2;
};
Quad lagrange3(const double* t, const double* f, double s) {
  const double a = t[0], b = t[1], c = t[2];
  const double l0 = (s - b) * (s - c) / ((a - b) * (a - c));
  const double l1 = (s - a) * (s - c) / ((b - a) * (b - c));
  const double l2 = (s - a) * (s - b) / ((c - a) * (c - b));
  const double d0 = (2 * s - b - c) / ((a - b) * (a - c));
  const double d1 = (2 * s - a - c) / ((b - a) * (b - c));
  const double d2 = (2 * s - a - b) / ((c - a) * (c - b));
  const double e0 = 2 / ((a - b) * (a - c)), e1 = 2 / ((b - a) * (b - c)), e2 = 2 / ((c - a) * (c - b));
  return {l0 * f[0] + l1 * f[1] + l2 * f[2], d0 * f[0] + d1 * f[1] + d2 * f[2], e0 * f[0] + e1 * f[1] + e2 * f[2]};
}

// Value at 0 of the polynomial through (x_k, v_k) (Neville).
double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& v) {
  std::vector<double> p = v;
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t k = 0; k + m < n; ++k) p[k] = (x[k + m] * p[k] - x[k] * p[k + 1]) / (x[k + m] - x[k]);
  return p[0];
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    default: return "inconclusive";
  }
}

Check check_ordering(const FlowContext& ctx, const Grid2D& g, const std::vector<double>& psi) {
  if (psi.size() != g.size()) throw std::invalid_argument("check_ordering: field size does not match the grid");
  Check c;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  int worst = -1;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2& p = g.p[k];
    const double f2 = phi2(ctx.pot, ctx.s2, p).phi, f1 = phi1(ctx.pot, p).phi, f = f2 + psi[k];
    lo = std::min(lo, f), hi = std::max(hi, f);
    const double v = std::max({f2 - f, f - f1, 0.0});
    if (v > c.value) c.value = v, worst = static_cast<int>(k);
  }
  c.tolerance = 1e-7 * (hi - lo);
  c.status = c.value <= c.tolerance ? Status::pass : Status::fail;
  if (worst >= 0) c.note = "max at node " + at(worst / (g.ny + 1), worst % (g.ny + 1));
  return c;
}

Check check_ellipticity(const FlowContext& ctx, const Grid2D& g, const std::vector<double>& psi) {
  Check c;
  c.value = std::numeric_limits<double>::infinity();
  for (int i = 1; i < g.nx; ++i)
    for (int j = 1; j < g.ny; ++j) {
      const int k = g.idx(i, j);
      const Vec2& p = g.p[k];
      const double m = ellipticity_margin(grad_phi(ctx, p, g.grad(psi, i, j)), phi2(ctx.pot, ctx.s2, p).phi + psi[k],
                                          ctx.pot.gas);
      if (m < c.value) c.value = m, c.note = "min at node " + at(i, j);
    }
  c.status = c.value > 0 ? Status::pass : Status::fail;
  return c;
}

Check check_psi_x_bound(const FlowContext& ctx, const Grid2D& g, const std::vector<double>& psi, double width) {
  const auto nsc = near_sonic_coords(ctx.geo);
  const double gam = ctx.pot.gas.gamma;
  Check c;
  c.tolerance = 1.0;
  for (int i = 1; i <= g.nx; ++i)
    for (int j = 0; j <= g.ny; ++j) {
      const Vec2& p = g.at(i, j);
      const double x = x_of(ctx, p);
      if (!(x > 0) || x >= width * ctx.s2.c2) continue;
      const double psix = -dot(g.grad(psi, i, j), nsc.e_r(p));
      const double ratio = std::abs(psix) * (gam + 1) / (2 * x);
      if (ratio > c.value) c.value = ratio, c.note = "max at node " + at(i, j);
    }
  const int cols = band_columns(ctx, g, width);
  if (cols < 8) {
    c.status = Status::inconclusive;
    c.note = "band under-resolved: " + std::to_string(cols) + " columns";
  } else {
    c.status = c.value < c.tolerance ? Status::pass : Status::fail;
  }
  return c;
}

Check check_rh_residual(const FlowContext& ctx, const Grid2D& g, const std::vector<double>& psi) {
  Check c;
  const int j = g.ny;
  double scale = 0;
  for (int i = 1; i < g.nx; ++i) {
    const int k = g.idx(i, j);
    const Vec2& p = g.p[k];
    const auto& m = g.metric[k];
    // tangential: centered; into Omega: first-order one-sided
    const double fx = (psi[g.idx(i + 1, j)] - psi[g.idx(i - 1, j)]) / (2 * g.hX);
    const double fy = (psi[k] - psi[g.idx(i, j - 1)]) / g.hY;
    const Vec2 gp{m.Jinv[0][0] * fx + m.Jinv[1][0] * fy, m.Jinv[0][1] * fx + m.Jinv[1][1] * fy};
    const Vec2 gphi = grad_phi(ctx, p, gp);
    const double phi = phi2(ctx.pot, ctx.s2, p).phi + psi[k];
    const auto f1 = phi1(ctx.pot, p);
    const Vec2 nu = shock_normal(g, i);
    const double rho = bernoulli_density(dot(gphi, gphi), phi, ctx.pot.gas);
    const double flux1 = ctx.pot.rho1 * dot(f1.grad, nu);
    scale = std::max(scale, std::abs(flux1));
    const double jump = std::abs(rho * dot(gphi, nu) - flux1);
    if (jump > c.value) c.value = jump, c.note = "max at shock node " + at(i, j);
  }
  c.tolerance = scale * g.hY;
  c.status = c.value <= c.tolerance ? Status::pass : Status::fail;
  return c;
}

Check check_fhat_slope(const FlowContext& ctx, const std::vector<Vec2>& pts, double width) {
  if (pts.size() < 2) throw std::invalid_argument("check_fhat_slope: need at least two shock points");
  const auto nsc = near_sonic_coords(ctx.geo);
  Check c;
  c.value = std::numeric_limits<double>::infinity();
  int used = 0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const Vec2 a = nsc.to_xy(pts[k]), b = nsc.to_xy(pts[k + 1]);
    if (std::max(a[0], b[0]) >= width * ctx.s2.c2) break;
    if (b[0] == a[0]) throw GeometryError("check_fhat_slope: shock points with equal x");
    const double s = (b[1] - a[1]) / (b[0] - a[0]);
    if (s < c.value) c.value = s, c.note = "min on segment " + std::to_string(k);
    ++used;
  }
  if (used == 0) {
    c.value = 0;
    c.note = "no shock segment in the band";
    return c;
  }
  c.status = c.value > 0 ? Status::pass : Status::fail;
  return c;
}

DrrEstimate estimate_drr_jump(const FlowContext& ctx, const Grid2D& g, const std::vector<double>& psi,
                              double y_fraction, int stations) {
  if (!(y_fraction > 0 && y_fraction < 1)) throw std::invalid_argument("estimate_drr_jump: y_fraction must be in (0, 1)");
  if (stations < 2) throw std::invalid_argument("estimate_drr_jump: need at least two stations");
  if (stations + 1 > g.nx) throw std::invalid_argument("estimate_drr_jump: grid has too few columns");
  const auto nsc = near_sonic_coords(ctx.geo);
  DrrEstimate e;
  e.y = y_fraction * nsc.to_xy(g.at(0, g.ny))[1];
  // psi and its y-derivatives along columns 0..stations+1 at y = e.y
  std::vector<double> X, P, Py, Pyy;
  for (int i = 0; i <= stations + 1; ++i) {
    std::vector<double> ys(g.ny + 1);
    for (int j = 0; j <= g.ny; ++j) ys[j] = nsc.to_xy(g.at(i, j))[1];
    int j0 = 0;
    while (j0 + 1 < g.ny && ys[j0 + 1] < e.y) ++j0;
    j0 = std::clamp(j0, 0, g.ny - 2);
    if (!(e.y >= ys[0] && e.y <= ys[g.ny])) throw GeometryError("estimate_drr_jump: station outside column");
    const double t[3] = {ys[j0], ys[j0 + 1], ys[j0 + 2]};
    const double f[3] = {psi[g.idx(i, j0)], psi[g.idx(i, j0 + 1)], psi[g.idx(i, j0 + 2)]};
    const Quad q = lagrange3(t, f, e.y);
    // columns are arcs of constant radius near the arc
    X.push_back(nsc.to_xy(g.at(i, j0 + 1))[0]);
    P.push_back(q.v), Py.push_back(q.d1), Pyy.push_back(q.d2);
  }
  for (int k = 1; k <= stations; ++k) {
    const double h1 = X[k] - X[k - 1], h2 = X[k + 1] - X[k];
    e.x.push_back(X[k]);
    e.drr.push_back(2 * (P[k + 1] * h1 - P[k] * (h1 + h2) + P[k - 1] * h2) / (h1 * h2 * (h1 + h2)));
    e.drt.push_back((Py[k + 1] - Py[k - 1]) / (h1 + h2));
    e.dtt.push_back(Pyy[k]);
  }
  e.limit = extrapolate_to_zero(e.x, e.drr);
  e.limit_linear = extrapolate_to_zero({e.x[0], e.x[1]}, {e.drr[0], e.drr[1]});
  e.noise = std::abs(e.limit - e.limit_linear);
  e.drt_limit = extrapolate_to_zero(e.x, e.drt);
  e.dtt_limit = extrapolate_to_zero(e.x, e.dtt);
  const double target = e.target = 1.0 / (ctx.pot.gas.gamma + 1);
  bool zero = true, up = true, down = true;
  for (std::size_t k = 0; k < e.drr.size(); ++k) {
    zero = zero && std::abs(e.drr[k]) < 1e-12;
    if (k > 0) up = up && e.drr[k] >= e.drr[k - 1], down = down && e.drr[k] <= e.drr[k - 1];
  }
  if (zero || !(up || down))
    e.status = Status::inconclusive;  // uniform state (no jump) or nonmonotone stations
  else
    e.status = std::abs(e.limit - target) <= 0.2 * target ? Status::pass : Status::fail;
  return e;
}

Check parabolic_norm_estimate(const FlowContext& ctx, const Grid2D& g, const std::vector<double>& psi, double width) {
  const auto nsc = near_sonic_coords(ctx.geo);
  Check c;
  for (int i = 1; i < g.nx; ++i)
    for (int j = 1; j < g.ny; ++j) {
      const Vec2& p = g.at(i, j);
      const double x = x_of(ctx, p);
      if (!(x > 0) || x >= width * ctx.s2.c2) continue;
      const double r = ctx.s2.c2 - x;
      const Vec2 er = nsc.e_r(p), et{-er[1], er[0]};
      const Vec2 gp = g.grad(psi, i, j);
      double H[2][2];
      g.hessian(psi, i, j, H);
      auto form = [&](const Vec2& a, const Vec2& b) {
        return a[0] * (H[0][0] * b[0] + H[0][1] * b[1]) + a[1] * (H[1][0] * b[0] + H[1][1] * b[1]);
      };
      const double v[6] = {
          std::abs(psi[g.idx(i, j)]) / (x * x),                               // (0, 0)
          std::abs(dot(gp, er)) / x,                                          // (1, 0)
          std::abs(r * dot(gp, et)) * std::pow(x, -1.5),                      // (0, 1)
          std::abs(form(er, er)),                                             // (2, 0)
          std::abs(r * form(er, et) + dot(gp, et)) / std::sqrt(x),            // (1, 1)
          std::abs(r * r * form(et, et) - r * dot(gp, er)) / x,               // (0, 2)
      };
      for (double w : v)
        if (w > c.value) c.value = w, c.note = "max at node " + at(i, j);
    }
  const int cols = band_columns(ctx, g, width);
  if (cols < 8) {
    c.status = Status::inconclusive;
    c.note = "band under-resolved: " + std::to_string(cols) + " columns";
  } else {
    c.status = std::isfinite(c.value) ? Status::pass : Status::fail;
  }
  return c;
}

double w11_distance_to_normal(const FlowContext& ctx, const Grid2D& g, const std::vector<double>& psi, int m,
                              double scale) {
  if (m < 1) throw std::invalid_argument("w11_distance_to_normal: m must be positive");
  if (!(scale > 0 && scale <= 1)) throw std::invalid_argument("w11_distance_to_normal: scale must be in (0, 1]");
  const StateTwo sn = normal_state_two(ctx.pot);
  const double xi1 = normal_xi1(ctx.pot, sn);
  const double cx = 0.45 * xi1, hx = 0.4 * std::abs(xi1) * scale;
  const double cy = 0.25 * sn.c2, hy = 0.25 * sn.c2 * scale;
  const double x0 = cx - hx, y0 = cy - hy, dx = 2 * hx / m, dy = 2 * hy / m;
  // nodal gradients once
  std::vector<Vec2> grad(g.size());
  for (int i = 0; i <= g.nx; ++i)
    for (int j = 0; j <= g.ny; ++j) grad[g.idx(i, j)] = g.grad(psi, i, j);
  // cell bounding boxes
  const int nc = g.nx * g.ny;
  std::vector<double> box(4 * nc);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      double* b = &box[4 * (i * g.ny + j)];
      b[0] = b[2] = std::numeric_limits<double>::infinity();
      b[1] = b[3] = -b[0];
      for (int a = 0; a < 2; ++a)
        for (int d = 0; d < 2; ++d) {
          const Vec2& q = g.at(i + a, j + d);
          b[0] = std::min(b[0], q[0]), b[1] = std::max(b[1], q[0]);
          b[2] = std::min(b[2], q[1]), b[3] = std::max(b[3], q[1]);
        }
    }
  // per-point values summed serially afterwards: independent of the thread count
  std::vector<double> cell(std::size_t(m) * m);
#pragma omp parallel for schedule(static)
  for (int q = 0; q < m * m; ++q) {
    const Vec2 p{x0 + (q / m + 0.5) * dx, y0 + (q % m + 0.5) * dy};
    bool found = false;
    double val = 0;
    for (int c = 0; c < nc && !found; ++c) {
      const double* b = &box[4 * c];
      const double tol = 1e-12 * (1 + std::abs(p[0]) + std::abs(p[1]));
      if (p[0] < b[0] - tol || p[0] > b[1] + tol || p[1] < b[2] - tol || p[1] > b[3] + tol) continue;
      const int i = c / g.ny, j = c % g.ny;
      const Vec2 &A = g.at(i, j), &B = g.at(i + 1, j), &C = g.at(i + 1, j + 1), &D = g.at(i, j + 1);
      // bilinear inverse by Newton
      double s = 0.5, t = 0.5;
      for (int it = 0; it < 30; ++it) {
        Vec2 f, fs, ft;
        for (int a = 0; a < 2; ++a) {
          f[a] = (1 - s) * (1 - t) * A[a] + s * (1 - t) * B[a] + s * t * C[a] + (1 - s) * t * D[a] - p[a];
          fs[a] = (1 - t) * (B[a] - A[a]) + t * (C[a] - D[a]);
          ft[a] = (1 - s) * (D[a] - A[a]) + s * (C[a] - B[a]);
        }
        const double det = fs[0] * ft[1] - fs[1] * ft[0];
        const double ds = (f[0] * ft[1] - f[1] * ft[0]) / det, dt = (fs[0] * f[1] - fs[1] * f[0]) / det;
        s -= ds, t -= dt;
        if (std::abs(ds) + std::abs(dt) < 1e-14) break;
      }
      const double eps = 1e-10;
      if (s < -eps || s > 1 + eps || t < -eps || t > 1 + eps) continue;
      const double w[4] = {(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t};
      const int k[4] = {g.idx(i, j), g.idx(i + 1, j), g.idx(i + 1, j + 1), g.idx(i, j + 1)};
      double ps = 0;
      Vec2 gp{0, 0};
      for (int a = 0; a < 4; ++a) {
        ps += w[a] * psi[k[a]];
        gp[0] += w[a] * grad[k[a]][0], gp[1] += w[a] * grad[k[a]][1];
      }
      const auto f = phi2(ctx.pot, ctx.s2, p);
      const auto fn = phi2(ctx.pot, sn, p);
      val = std::abs(f.phi + ps - fn.phi) + std::abs(f.grad[0] + gp[0] - fn.grad[0]) +
            std::abs(f.grad[1] + gp[1] - fn.grad[1]);
      found = true;
    }
    // points outside Omega make the subdomain ill-defined: flagged with NaN
    cell[q] = found ? val * dx * dy : std::numeric_limits<double>::quiet_NaN();
  }
  double total = 0;
  for (double v : cell) total += v;
  if (std::isnan(total)) throw GeometryError("w11_distance_to_normal: comparison rectangle leaves the domain");
  return total;
}

bool DiagnosticsBlock::verified() const {
  for (const Check* c : {&ordering, &ellipticity, &psi_x_bound, &rh_residual, &fhat_slope})
    if (c->status == Status::fail) return false;
  return true;
}

DiagnosticsBlock diagnose(const FlowContext& ctx, const Grid2D& g, const std::vector<double>& psi,
                          const CutoffConfig& cutoff) {
  DiagnosticsBlock d;
  const double w = cutoff.near_arc_width;
  d.ordering = check_ordering(ctx, g, psi);
  d.ellipticity = check_ellipticity(ctx, g, psi);
  d.psi_x_bound = check_psi_x_bound(ctx, g, psi, w);
  d.measured_delta0 = 2 * (1 - d.psi_x_bound.value);
  d.proof_bound_ratio = d.psi_x_bound.value * 1.5;  // ratio against 4x/(3(gamma + 1))
  d.rh_residual = check_rh_residual(ctx, g, psi);
  std::vector<Vec2> pts;
  for (int i = 0; i <= g.nx; ++i) pts.push_back(g.at(i, g.ny));
  d.fhat_slope = check_fhat_slope(ctx, pts, w);
  if (g.nx >= 4) {
    d.drr = estimate_drr_jump(ctx, g, psi);
    d.drr_jump.value = d.drr.limit;
    d.drr_jump.tolerance = 0.2 / (ctx.pot.gas.gamma + 1);
    d.drr_jump.status = d.drr.status;
    d.drr_jump.note = "target 1/(gamma + 1)";
    d.cross_derivatives.value = std::max(std::abs(d.drr.drt_limit), std::abs(d.drr.dtt_limit));
    // noise floor of the extrapolation, never below round-off of the second differences
    d.cross_derivatives.tolerance = 3 * std::max(d.drr.noise, 1e-8);
    d.cross_derivatives.status = d.drr.status == Status::inconclusive ? Status::inconclusive
                                 : d.cross_derivatives.value <= d.cross_derivatives.tolerance ? Status::pass
                                                                                              : Status::fail;
  }
  d.parabolic_norm = parabolic_norm_estimate(ctx, g, psi, w);
  try {
    d.w11_to_normal.value = w11_distance_to_normal(ctx, g, psi);
    d.w11_to_normal.status = Status::pass;
  } catch (const GeometryError& e) {
    d.w11_to_normal.note = e.what();
  }
  return d;
}

}  // namespace srd
