#include <doctest.h>

#include <cmath>
#include <random>

#include "srd/grid.hpp"
#include "support.hpp"

using namespace srd;
using doctest::Approx;

namespace {
double dist(const Vec2& a, const Vec2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }
}  // namespace

TEST_CASE("wedge geometry at 85 degrees") {
  const auto ctx = testing::context(85);
  const auto& g = ctx.geo;
  const auto& s = ctx.s2;
  const double tw = 85 * kPi / 180;
  CHECK(g.p0[0] == Approx(ctx.pot.xi0).epsilon(1e-15));
  CHECK(g.p0[1] == Approx(ctx.pot.xi0 * std::tan(tw)).epsilon(1e-14));
  CHECK(std::abs(dist(g.p1, g.sonic_center) - s.c2) < 1e-12);
  CHECK(std::abs(dist(g.p4, g.sonic_center) - s.c2) < 1e-12);
  CHECK(std::abs(g.p4[1] - g.p4[0] * std::tan(tw)) < 1e-12);  // P4 on the wedge line
  CHECK(g.p3[0] == 0.0);
  CHECK(g.p3[1] == 0.0);
  CHECK(g.p2[1] == 0.0);
  // P1 on S1 = {phi1 = phi2}: independent circle-line intersection
  const Vec2 n{ctx.pot.u1 - s.u2, -s.v2};
  const Vec2 t{-n[1] / std::hypot(n[0], n[1]), n[0] / std::hypot(n[0], n[1])};
  const Vec2 d{g.p0[0] - s.u2, g.p0[1] - s.v2};
  const double b = d[0] * t[0] + d[1] * t[1], c = d[0] * d[0] + d[1] * d[1] - s.c2 * s.c2;
  const double r1 = -b - std::sqrt(b * b - c), r2 = -b + std::sqrt(b * b - c);
  const Vec2 q1{g.p0[0] + r1 * t[0], g.p0[1] + r1 * t[1]}, q2{g.p0[0] + r2 * t[0], g.p0[1] + r2 * t[1]};
  CHECK(std::min(dist(g.p1, q1), dist(g.p1, q2)) < 1e-12);
  CHECK(phi1(ctx.pot, g.p1).phi == Approx(phi2(ctx.pot, s, g.p1).phi).epsilon(1e-12));
  // P1 strictly between P0 and the wedge in angle about the sonic center
  const double a1 = std::atan2(g.p1[1] - s.v2, g.p1[0] - s.u2);
  CHECK(a1 > tw);
  // the straight shock P0P1 lies on the supersonic side
  CHECK(dist(g.p0, g.sonic_center) > s.c2);
}

TEST_CASE("normal reflection geometry") {
  const auto ctx = testing::context(90);
  CHECK(ctx.geo.sonic_center[0] == 0.0);
  CHECK(ctx.geo.sonic_center[1] == 0.0);
  CHECK(ctx.geo.p1[0] == Approx(normal_xi1(ctx.pot, ctx.s2)).epsilon(1e-15));
  CHECK(std::abs(dist(ctx.geo.p1, {0, 0}) - ctx.s2.c2) < 1e-12);
}

TEST_CASE("geometry rejects a subsonic state (2) at P0") {
  const auto pot = potential_incident(GasParams{}, 2.0);
  const double ts = sonic_angle(pot);
  const auto s = state_two_a(pot, ts - 0.002);
  CHECK_THROWS_AS(build_geometry(pot, s), GeometryError);
}

TEST_CASE("near-sonic coordinates") {
  const auto ctx = testing::context(80);
  const auto nsc = near_sonic_coords(ctx.geo);
  const auto xy = nsc.to_xy(ctx.geo.p4);
  CHECK(std::abs(xy[0]) < 1e-14);
  CHECK(std::abs(xy[1]) < 1e-14);
  const double tw = 80 * kPi / 180, r = ctx.s2.c2 - 0.05;
  const Vec2 p{ctx.s2.u2 + r * std::cos(tw + 0.2), ctx.s2.v2 + r * std::sin(tw + 0.2)};
  CHECK(nsc.to_xy(p)[0] == Approx(0.05).epsilon(1e-13));
  CHECK(nsc.to_xy(p)[1] == Approx(0.2).epsilon(1e-13));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2, 2);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    const Vec2 q{U(rng), U(rng)};
    const Vec2 back = nsc.from_xy(nsc.to_xy(q));
    worst = std::max(worst, dist(q, back));
  }
  CHECK(worst < 1e-13);
  // the wedge from the center outwards is {y = 0}
  for (double s : {0.1, 0.5, 1.0}) {
    const Vec2 w{ctx.s2.u2 + s * std::cos(tw), ctx.s2.v2 + s * std::sin(tw)};
    CHECK(std::abs(nsc.to_xy(w)[1]) < 1e-14);
  }
  CHECK_THROWS_AS(nsc.to_xy(ctx.geo.sonic_center), GeometryError);
  CHECK_THROWS_AS(nsc.from_xy({ctx.s2.c2 + 0.1, 0}), GeometryError);
}

TEST_CASE("shock curve spline") {
  std::vector<double> eta, xi;
  for (int k = 0; k <= 10; ++k) eta.push_back(0.1 * k), xi.push_back(0.01 * k * k);
  const ShockCurve c(eta, xi, 2.0);  // xi = eta^2: f'(0) = 0, f'(1) = 2
  for (double e : {0.0, 0.05, 0.33, 0.71, 1.0}) {
    CHECK(c.xi(e) == Approx(e * e).epsilon(1e-13));
    CHECK(c.dxi(e) == Approx(2 * e).epsilon(1e-12));
  }
  CHECK_THROWS_AS(ShockCurve({0.0, 0.0}, {1.0, 1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ShockCurve({0.0}, {1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("initial shock") {
  for (double deg : {60.0, 80.0, 89.0}) {
    CAPTURE(deg);
    const auto ctx = testing::context(deg);
    const auto sh = initial_shock(ctx.geo);
    CHECK(std::abs(sh.dxi(0)) < 1e-10);  // meets {eta = 0} orthogonally
    CHECK(sh.point(sh.eta_top())[0] == Approx(ctx.geo.p1[0]).epsilon(1e-14));
    CHECK(sh.eta_top() == ctx.geo.p1[1]);
    CHECK(sh.dxi(sh.eta_top()) == Approx(ctx.geo.s1_down[0] / ctx.geo.s1_down[1]).epsilon(1e-12));
    // monotone, between the wedge and state (1): phi2 <= phi1 side of S1 and xi < 0
    for (int k = 0; k <= 50; ++k) {
      const double e = sh.eta_top() * k / 50;
      const Vec2 p = sh.point(e);
      CHECK(ctx.geo.s1_side(ctx.pot, ctx.s2, p) >= -1e-12);
      if (k > 0) CHECK(sh.dxi(e) * (ctx.geo.s1_down[0] / ctx.geo.s1_down[1]) >= 0);
    }
  }
  const auto n = testing::context(90);
  const auto sh = initial_shock(n.geo);
  CHECK(sh.xi(0) == Approx(normal_xi1(n.pot, n.s2)).epsilon(1e-14));  // the vertical line of normal reflection
  CHECK(sh.xi(0.5 * sh.eta_top()) == Approx(normal_xi1(n.pot, n.s2)).epsilon(1e-14));
}

TEST_CASE("grid: boundaries, corners and orientation") {
  const auto ctx = testing::context(85);
  const auto sh = initial_shock(ctx.geo);
  const auto g = build_grid(ctx.geo, sh, GridConfig{24, 20, 2.0});
  const auto nsc = near_sonic_coords(ctx.geo);
  CHECK(dist(g.at(0, g.ny), ctx.geo.p1) < 1e-14);  // P1
  CHECK(dist(g.at(g.nx, 0), {0, 0}) < 1e-14);      // P3
  CHECK(g.at(g.nx, g.ny)[1] == 0.0);               // P2 on the symmetry line
  for (int j = 0; j <= g.ny; ++j) CHECK(std::abs(nsc.to_xy(g.at(0, j))[0]) < 1e-12);  // sonic arc
  for (int i = 0; i < g.nx; ++i) CHECK(std::abs(nsc.to_xy(g.at(i, 0))[1]) < 1e-12);   // wedge
  for (int j = 0; j <= g.ny; ++j) CHECK(g.at(g.nx, j)[1] == Approx(0.0).epsilon(1e-14));  // symmetry line
  for (int i = 0; i <= g.nx; ++i) {
    const Vec2 p = g.at(i, g.ny);
    CHECK(sh.xi(p[1]) == Approx(p[0]).epsilon(1e-12));  // shock
  }
  CHECK(g.min_jacobian() > 0);
  for (const auto& m : g.metric) CHECK(m.det < 0);
  // near the arc, columns are arcs of constant radius
  for (int i = 1; i < 4; ++i) {
    const double x0 = nsc.to_xy(g.at(i, 0))[0];
    for (int j = 0; j <= g.ny; ++j) CHECK(nsc.to_xy(g.at(i, j))[0] == Approx(x0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(build_grid(ctx.geo, sh, GridConfig{3, 8, 2.0}), std::invalid_argument);
}

TEST_CASE("grid: derivatives are second order") {
  const auto ctx = testing::context(80);
  const auto sh = initial_shock(ctx.geo);
  auto f = [](const Vec2& p) { return std::sin(1.3 * p[0]) * std::cos(0.7 * p[1]) + p[0] * p[1]; };
  auto fx = [](const Vec2& p) { return 1.3 * std::cos(1.3 * p[0]) * std::cos(0.7 * p[1]) + p[1]; };
  auto fxy = [](const Vec2& p) { return -0.91 * std::cos(1.3 * p[0]) * std::sin(0.7 * p[1]) + 1; };
  double eg[2], eh[2];
  for (int k = 0; k < 2; ++k) {
    const int n = 32 << k;
    const auto g = build_grid(ctx.geo, sh, GridConfig{n, n, 2.0});
    std::vector<double> v(g.size());
    for (std::size_t q = 0; q < g.size(); ++q) v[q] = f(g.p[q]);
    eg[k] = eh[k] = 0;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const Vec2& p = g.at(i, j);
        eg[k] = std::max(eg[k], std::abs(g.grad(v, i, j)[0] - fx(p)));
        double H[2][2];
        g.hessian(v, i, j, H);
        if (i > 0 && i < n && j > 0 && j < n) eh[k] = std::max(eh[k], std::abs(H[0][1] - fxy(p)));
      }
  }
  CHECK(std::log2(eg[0] / eg[1]) > 1.8);
  CHECK(std::log2(eh[0] / eh[1]) > 1.7);  // 1.68 at 16/32, 1.77 at 32/64: approaching 2
}
