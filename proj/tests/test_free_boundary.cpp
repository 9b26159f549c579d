#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace srd;
using doctest::Approx;

namespace {

SolveConfig config(int n, double lambda = 0.5) {
  SolveConfig c;
  c.grid.nx = c.grid.ny = n;
  c.outer_tol = 1e-9;
  c.outer_max_iter = 200;
  c.lambda = lambda;
  return c;
}

const double kDeg = kPi / 180;

}  // namespace

TEST_CASE("solve configuration is validated") {
  SolveConfig c;
  CHECK_NOTHROW(c.validate());
  c.lambda = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.lambda_min = 0.9;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.grid.nx = 3;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.outer_tol = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("regime checks") {
  const auto pot = potential_incident(GasParams{}, 2.0);
  const double ts = sonic_angle(pot);
  CHECK_THROWS_AS(solve(GasParams{}, 2.0, ts - 0.01, config(16)), RegimeError);
  CHECK_THROWS_AS(solve(GasParams{}, 2.0, 95 * kDeg, config(16)), RegimeError);
}

TEST_CASE("shock update: fixed point and offset recovery") {
  const auto ctx = testing::context(90);
  const auto g0 = testing::grid(ctx, 16);
  const std::vector<double> zero(g0.size(), 0.0);
  const auto same = update_shock(ctx, g0, zero, 1.0);
  CHECK(same.displacement < 1e-13);
  const double xi1 = normal_xi1(ctx.pot, ctx.s2);
  for (double off : {0.02, -0.02}) {
    CAPTURE(off);
    // shift the lower part of the shock; P1 stays pinned
    std::vector<double> eta, xi;
    const double top = ctx.geo.p1[1];
    for (int k = 0; k <= 40; ++k) {
      const double e = top * k / 40, w = std::pow(1 - e / top, 2);
      eta.push_back(e);
      xi.push_back(xi1 + off * w);
    }
    const ShockCurve sh(eta, xi, 0.0);
    const auto g = build_grid(ctx.geo, sh, GridConfig{16, 16, 2.0});
    const auto up = update_shock(ctx, g, std::vector<double>(g.size(), 0.0), 1.0);
    // phi2 - phi1 is affine in xi: one full step returns to the straight shock
    // up to the (1, 4, 1)/6 smoothing of the correction
    double before = 0, after = 0;
    for (int k = 0; k <= 40; ++k) {
      before = std::max(before, std::abs(sh.xi(eta[k]) - xi1));
      after = std::max(after, std::abs(up.shock.xi(eta[k]) - xi1));
    }
    CHECK(after <= 0.1 * before);
    CHECK(std::signbit(up.shock.xi(0) - sh.xi(0)) != std::signbit(off));
    const auto half = update_shock(ctx, g, std::vector<double>(g.size(), 0.0), 0.5);
    CHECK(half.displacement == Approx(0.5 * up.displacement).epsilon(1e-12));
  }
}

TEST_CASE("normal reflection is returned without iteration") {
  const auto s = solve(GasParams{}, 2.0, 90 * kDeg, config(16));
  CHECK(s.report.analytic);
  CHECK(s.report.converged);
  CHECK(s.report.verified);
  CHECK(s.report.history.empty());
  for (double v : s.psi) CHECK(v == 0.0);
  CHECK(s.shock.xi(0) == Approx(normal_xi1(s.ctx.pot, s.ctx.s2)).epsilon(1e-14));
}

TEST_CASE("regular reflection near 90 degrees: regression and relaxation independence") {
  int calls = 0;
  auto cfg = config(32);
  cfg.observer = [&](int, const InnerReport&, const Grid2D&, const std::vector<double>&) { ++calls; };
  const auto a = solve(GasParams{}, 2.0, 89 * kDeg, cfg);
  REQUIRE(a.report.converged);
  CHECK(a.report.verified);
  CHECK(calls == int(a.report.history.size()));
  // frozen values of this discretization (32 x 32, grading 2)
  CHECK(a.shock.xi(0) == Approx(-0.86381430192).epsilon(1e-8));
  CHECK(a.report.diagnostics.psi_x_bound.value == Approx(0.096).epsilon(0.02));
  // the shock bends towards the normal-reflection shock
  const double xi1 = normal_xi1(a.ctx.pot, normal_state_two(a.ctx.pot));
  CHECK(std::abs(a.shock.xi(0) - xi1) < 0.02);
  // halving the relaxation changes only the path, not the fixed point
  const auto b = solve(GasParams{}, 2.0, 89 * kDeg, config(32, 0.25));
  REQUIRE(b.report.converged);
  double d = 0;
  for (std::size_t k = 0; k < a.psi.size(); ++k) d = std::max(d, std::abs(a.psi[k] - b.psi[k]));
  CHECK(d < 1e-7);
  CHECK(std::abs(a.shock.xi(0) - b.shock.xi(0)) < 1e-7);
  // serial and OpenMP kernels produce the same field
  auto cs = config(32);
  cs.exec = Exec::serial;
  const auto c = solve(GasParams{}, 2.0, 89 * kDeg, cs);
  for (std::size_t k = 0; k < a.psi.size(); ++k) REQUIRE(a.psi[k] == c.psi[k]);
}

TEST_CASE("shock position moves continuously with the wedge angle") {
  const auto a = solve(GasParams{}, 2.0, 89 * kDeg, config(24));
  const auto b = solve(GasParams{}, 2.0, 88 * kDeg, config(24));
  const auto n = testing::context(90);
  const double xi1 = normal_xi1(n.pot, n.s2);
  REQUIRE(a.report.converged);
  REQUIRE(b.report.converged);
  CHECK(std::abs(a.shock.xi(0) - xi1) < std::abs(b.shock.xi(0) - xi1));
}
