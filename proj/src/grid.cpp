#include "srd/grid.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace srd {

namespace {

double smoothstep5(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10 - 15 * t + 6 * t * t);
}

// Weights of the second-order first derivative at position k of [0, n].
void d1_weights(int k, int n, double h, int& k0, double w[3]) {
  if (k == 0) {
    k0 = 0, w[0] = -1.5 / h, w[1] = 2 / h, w[2] = -0.5 / h;
  } else if (k == n) {
    k0 = n - 2, w[0] = 0.5 / h, w[1] = -2 / h, w[2] = 1.5 / h;
  } else {
    k0 = k - 1, w[0] = -0.5 / h, w[1] = 0, w[2] = 0.5 / h;
  }
}

// Second derivative: central interior, 4-point one-sided at the ends.
void d2_weights(int k, int n, double h, int& k0, double w[4], int& len) {
  const double h2 = h * h;
  if (k == 0) {
    k0 = 0, len = 4, w[0] = 2 / h2, w[1] = -5 / h2, w[2] = 4 / h2, w[3] = -1 / h2;
  } else if (k == n) {
    k0 = n - 3, len = 4, w[0] = -1 / h2, w[1] = 4 / h2, w[2] = -5 / h2, w[3] = 2 / h2;
  } else {
    k0 = k - 1, len = 3, w[0] = 1 / h2, w[1] = -2 / h2, w[2] = 1 / h2, w[3] = 0;
  }
}

template <class Get>
double dX_impl(const Grid2D& g, Get get, int i, int j) {
  int k0;
  double w[3];
  d1_weights(i, g.nx, g.hX, k0, w);
  return w[0] * get(k0, j) + w[1] * get(k0 + 1, j) + w[2] * get(k0 + 2, j);
}

template <class Get>
double dY_impl(const Grid2D& g, Get get, int i, int j) {
  int k0;
  double w[3];
  d1_weights(j, g.ny, g.hY, k0, w);
  return w[0] * get(i, k0) + w[1] * get(i, k0 + 1) + w[2] * get(i, k0 + 2);
}

template <class Get>
double dXX_impl(const Grid2D& g, Get get, int i, int j) {
  int k0, len;
  double w[4];
  d2_weights(i, g.nx, g.hX, k0, w, len);
  double s = 0;
  for (int q = 0; q < len; ++q) s += w[q] * get(k0 + q, j);
  return s;
}

template <class Get>
double dYY_impl(const Grid2D& g, Get get, int i, int j) {
  int k0, len;
  double w[4];
  d2_weights(j, g.ny, g.hY, k0, w, len);
  double s = 0;
  for (int q = 0; q < len; ++q) s += w[q] * get(i, k0 + q);
  return s;
}

template <class Get>
double dXY_impl(const Grid2D& g, Get get, int i, int j) {
  int k0;
  double w[3];
  d1_weights(j, g.ny, g.hY, k0, w);
  double s = 0;
  for (int q = 0; q < 3; ++q) s += w[q] * dX_impl(g, get, i, k0 + q);
  return s;
}

}  // namespace

double Grid2D::dX(const std::vector<double>& f, int i, int j) const {
  return dX_impl(*this, [&](int a, int b) { return f[idx(a, b)]; }, i, j);
}
double Grid2D::dY(const std::vector<double>& f, int i, int j) const {
  return dY_impl(*this, [&](int a, int b) { return f[idx(a, b)]; }, i, j);
}
double Grid2D::dXX(const std::vector<double>& f, int i, int j) const {
  return dXX_impl(*this, [&](int a, int b) { return f[idx(a, b)]; }, i, j);
}
double Grid2D::dYY(const std::vector<double>& f, int i, int j) const {
  return dYY_impl(*this, [&](int a, int b) { return f[idx(a, b)]; }, i, j);
}
double Grid2D::dXY(const std::vector<double>& f, int i, int j) const {
  return dXY_impl(*this, [&](int a, int b) { return f[idx(a, b)]; }, i, j);
}

Vec2 Grid2D::grad(const std::vector<double>& f, int i, int j) const {
  const auto& m = metric[idx(i, j)];
  const double fx = dX(f, i, j), fy = dY(f, i, j);
  return {m.Jinv[0][0] * fx + m.Jinv[1][0] * fy, m.Jinv[0][1] * fx + m.Jinv[1][1] * fy};
}

void Grid2D::hessian(const std::vector<double>& f, int i, int j, double H[2][2]) const {
  const auto& m = metric[idx(i, j)];
  const Vec2 g = grad(f, i, j);
  // logical Hessian minus the curvature of the map, then pulled back
  double L[2][2];
  L[0][0] = dXX(f, i, j) - g[0] * m.D2[0][0] - g[1] * m.D2[1][0];
  L[0][1] = L[1][0] = dXY(f, i, j) - g[0] * m.D2[0][1] - g[1] * m.D2[1][1];
  L[1][1] = dYY(f, i, j) - g[0] * m.D2[0][2] - g[1] * m.D2[1][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double s = 0;
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) s += m.Jinv[p][a] * L[p][q] * m.Jinv[q][b];
      H[a][b] = s;
    }
}

double Grid2D::min_jacobian() const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& m : metric) d = std::min(d, std::abs(m.det));
  return d;
}

Grid2D build_grid(const WedgeGeometry& geo, const ShockCurve& shock, const GridConfig& cfg) {
  if (cfg.nx < 4 || cfg.ny < 4) throw std::invalid_argument("build_grid: need at least 4 cells per direction");
  if (!(cfg.grading > 0.0)) throw std::invalid_argument("build_grid: grading must be positive");
  Grid2D g;
  g.nx = cfg.nx, g.ny = cfg.ny;
  g.hX = 1.0 / g.nx, g.hY = 1.0 / g.ny;
  const int nx = g.nx, ny = g.ny;
  const Vec2 C = geo.sonic_center;
  const double c2 = geo.c2, Lw = c2 + std::hypot(C[0], C[1]);
  g.sigma.resize(nx + 1);
  for (int i = 0; i <= nx; ++i) g.sigma[i] = std::expm1(cfg.grading * i / nx) / std::expm1(cfg.grading);
  g.sigma[nx] = 1.0;

  std::vector<Vec2> B(nx + 1), D(nx + 1);
  for (int i = 0; i <= nx; ++i) {
    const double r = c2 - Lw * g.sigma[i];
    B[i] = {C[0] + r * geo.e_w[0], C[1] + r * geo.e_w[1]};
  }
  B[nx] = {0.0, 0.0};

  // Shock nodes: radius-matched to the wedge nodes near the arc (columns are
  // then exact circles about C), a Hermite profile in sigma beyond.
  const double etaP1 = shock.eta_top();
  auto rad = [&](double e) { const Vec2 q = shock.point(e); return std::hypot(q[0] - C[0], q[1] - C[1]); };
  constexpr int ns = 2000;
  double rmin = rad(etaP1), emin = etaP1;
  for (int k = 0; k <= ns; ++k) {
    const double e = etaP1 * k / ns, r = rad(e);
    if (r < rmin) rmin = r, emin = e;
  }
  const double xmax = c2 - rmin;
  if (!(xmax > 0.0)) throw GeometryError("build_grid: shock does not enter the sonic disk");
  const double sb = 0.5 * xmax / Lw;
  const double sc = std::min(sb + 0.5 * (1 - sb), std::max(3 * sb, sb + 0.2));
  auto eta_at_radius = [&](double target) {
    boost::uintmax_t it = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    const double flo = rad(emin) - target, fhi = rad(etaP1) - target;
    if (flo > 0.0 || fhi < 0.0) throw GeometryError("build_grid: radius matching failed");
    if (fhi == 0.0) return etaP1;
    auto r = boost::math::tools::toms748_solve([&](double e) { return rad(e) - target; }, emin, etaP1, flo, fhi, tol, it);
    return 0.5 * (r.first + r.second);
  };
  std::vector<double> etaD(nx + 1);
  etaD[0] = etaP1;
  int ib = 0;
  for (int i = 1; i <= nx && g.sigma[i] <= sb; ++i) etaD[i] = eta_at_radius(c2 - Lw * g.sigma[i]), ib = i;
  const double ea = eta_at_radius(c2 - sb * Lw);
  const double ds = 1e-6 * sb;
  const double d1 = (ea - eta_at_radius(c2 - (sb - ds) * Lw)) / ds;
  const double L = 1 - sb, sec = -ea / L;
  const double d0s = std::max(d1, 3 * sec);
  for (int i = ib + 1; i <= nx; ++i) {
    const double t = (g.sigma[i] - sb) / L;
    const double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t, h11 = t * t * t - t * t;
    etaD[i] = h00 * ea + h10 * L * d0s + h11 * L * sec;
  }
  etaD[nx] = 0.0;
  for (int i = 0; i <= nx; ++i) D[i] = shock.point(etaD[i]);
  D[0] = geo.p1;

  g.p.resize(std::size_t(nx + 1) * (ny + 1));
  for (int i = 0; i <= nx; ++i) {
    const double w = smoothstep5((g.sigma[i] - sb) / (sc - sb));
    const double rb = std::hypot(B[i][0] - C[0], B[i][1] - C[1]), rd = std::hypot(D[i][0] - C[0], D[i][1] - C[1]);
    const double tb = std::atan2(B[i][1] - C[1], B[i][0] - C[0]);
    double td = std::atan2(D[i][1] - C[1], D[i][0] - C[0]);
    if (td < tb) td += 2 * kPi;
    for (int j = 0; j <= ny; ++j) {
      const double Y = double(j) / ny;
      Vec2 lin{(1 - Y) * B[i][0] + Y * D[i][0], (1 - Y) * B[i][1] + Y * D[i][1]};
      Vec2 q = lin;
      if (w < 1.0) {
        const double rr = (1 - Y) * rb + Y * rd, th = (1 - Y) * tb + Y * td;
        const Vec2 pol{C[0] + rr * std::cos(th), C[1] + rr * std::sin(th)};
        q = {(1 - w) * pol[0] + w * lin[0], (1 - w) * pol[1] + w * lin[1]};
      }
      g.p[g.idx(i, j)] = q;
    }
  }

  g.metric.resize(g.p.size());
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j) {
      auto& m = g.metric[g.idx(i, j)];
      for (int a = 0; a < 2; ++a) {
        auto get = [&](int u, int v) { return g.p[g.idx(u, v)][a]; };
        m.J[a][0] = dX_impl(g, get, i, j);
        m.J[a][1] = dY_impl(g, get, i, j);
        m.D2[a][0] = dXX_impl(g, get, i, j);
        m.D2[a][1] = dXY_impl(g, get, i, j);
        m.D2[a][2] = dYY_impl(g, get, i, j);
      }
      m.det = m.J[0][0] * m.J[1][1] - m.J[0][1] * m.J[1][0];
      m.Jinv[0][0] = m.J[1][1] / m.det, m.Jinv[0][1] = -m.J[0][1] / m.det;
      m.Jinv[1][0] = -m.J[1][0] / m.det, m.Jinv[1][1] = m.J[0][0] / m.det;
    }
  // the map is orientation-reversing (X into Omega, Y counter-clockwise); any sign change is a fold
  for (const auto& m : g.metric)
    if (!(m.det < 0.0)) throw GeometryError("build_grid: folded or degenerate map");
  return g;
}

}  // namespace srd
