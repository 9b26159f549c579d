#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace srd;
using doctest::Approx;

namespace {

std::vector<double> radial_field(const FlowContext& ctx, const Grid2D& g, double coef) {
  const auto nsc = near_sonic_coords(ctx.geo);
  std::vector<double> psi(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2& p = g.p[k];
    const double x = ctx.s2.c2 - std::hypot(p[0] - nsc.center[0], p[1] - nsc.center[1]);
    psi[k] = coef * x * x;
  }
  return psi;
}

}  // namespace

TEST_CASE("ordering: exact reflection passes, a dip below phi2 fails") {
  const auto ctx = testing::context(90);
  const auto g = testing::grid(ctx, 32);
  std::vector<double> psi(g.size(), 0.0);
  const auto ok = check_ordering(ctx, g, psi);
  CHECK(ok.status == Status::pass);
  CHECK(ok.value < 1e-14);
  for (int i = 10; i < 14; ++i)
    for (int j = 10; j < 14; ++j) psi[g.idx(i, j)] = -0.1;
  const auto bad = check_ordering(ctx, g, psi);
  CHECK(bad.status == Status::fail);
  CHECK(bad.value == Approx(0.1).epsilon(1e-12));
  CHECK(bad.note.find("node") != std::string::npos);
  CHECK_THROWS_AS(check_ordering(ctx, g, std::vector<double>(3, 0.0)), std::invalid_argument);
}

TEST_CASE("ellipticity: a strong gradient leaves the elliptic region") {
  const auto ctx = testing::context(89);
  const auto g = testing::grid(ctx, 32);
  CHECK(check_ellipticity(ctx, g, std::vector<double>(g.size(), 0.0)).status == Status::pass);
  std::vector<double> psi(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) psi[k] = 3 * g.p[k][0];
  CHECK(check_ellipticity(ctx, g, psi).status == Status::fail);
}

TEST_CASE("psi_x bound: calibration and negative controls") {
  const auto ctx = testing::context(89);
  const auto g = testing::grid(ctx, 64);
  const double gp1 = ctx.pot.gas.gamma + 1;
  // psi = x^2/(2(gamma + 1)): |psi_x| (gamma + 1)/(2x) = 1/2 exactly
  const auto half = check_psi_x_bound(ctx, g, radial_field(ctx, g, 0.5 / gp1), 0.2);
  CHECK(half.status == Status::pass);
  // O(h) error of the graded first-column difference: 32/63 at n = 64
  CHECK(half.value == Approx(0.5).epsilon(2e-2));
  const auto fine = testing::grid(ctx, 128);
  const double e128 = check_psi_x_bound(ctx, fine, radial_field(ctx, fine, 0.5 / gp1), 0.2).value - 0.5;
  CHECK(e128 < 0.6 * (half.value - 0.5));
  // psi = x^2: ratio gamma + 1
  const auto steep = check_psi_x_bound(ctx, g, radial_field(ctx, g, 1.0), 0.2);
  CHECK(steep.status == Status::fail);
  CHECK(steep.value == Approx(gp1).epsilon(2e-2));
  // psi = x y: psi_x does not vanish on the arc
  const auto nsc = near_sonic_coords(ctx.geo);
  std::vector<double> xy(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2 q = nsc.to_xy(g.p[k]);
    xy[k] = q[0] * q[1];
  }
  CHECK(check_psi_x_bound(ctx, g, xy, 0.2).status == Status::fail);
  // a band too thin to hold 8 columns cannot be judged
  CHECK(check_psi_x_bound(ctx, testing::grid(ctx, 8), xy, 0.2).status == Status::inconclusive);
}

TEST_CASE("RH residual: exact shock passes, a wrong normal gradient fails") {
  const auto ctx = testing::context(90);
  const auto g = testing::grid(ctx, 64);
  std::vector<double> psi(g.size(), 0.0);
  const auto ok = check_rh_residual(ctx, g, psi);
  CHECK(ok.status == Status::pass);
  CHECK(ok.value < 1e-12);
  CHECK(ok.tolerance > 0);
  const double xi1 = normal_xi1(ctx.pot, ctx.s2);
  for (std::size_t k = 0; k < g.size(); ++k) psi[k] = 0.1 * (g.p[k][0] - xi1);
  CHECK(check_rh_residual(ctx, g, psi).status == Status::fail);
}

TEST_CASE("f-hat slope: sign of dy/dx near the arc") {
  const auto ctx = testing::context(89);
  const auto nsc = near_sonic_coords(ctx.geo);
  const double c2 = ctx.s2.c2;
  std::vector<Vec2> up, down;
  for (int k = 0; k <= 10; ++k) {
    const double x = 0.01 * c2 * k;
    up.push_back(nsc.from_xy({x, 0.1 + 0.5 * x}));
    down.push_back(nsc.from_xy({x, 0.1 - 0.5 * x}));
  }
  const auto a = check_fhat_slope(ctx, up, 0.2);
  CHECK(a.status == Status::pass);
  CHECK(a.value == Approx(0.5).epsilon(1e-10));
  const auto b = check_fhat_slope(ctx, down, 0.2);
  CHECK(b.status == Status::fail);
  CHECK(b.value == Approx(-0.5).epsilon(1e-10));
  // no segment inside the band
  CHECK(check_fhat_slope(ctx, {nsc.from_xy({0.5 * c2, 0.1}), nsc.from_xy({0.6 * c2, 0.2})}, 0.2).status ==
        Status::inconclusive);
  CHECK_THROWS_AS(check_fhat_slope(ctx, {up[0]}, 0.2), std::invalid_argument);
}

TEST_CASE("D_rr extrapolation: calibration on x^2/(2(gamma + 1))") {
  const auto ctx = testing::context(89);
  const auto g = testing::grid(ctx, 64);
  const double gp1 = ctx.pot.gas.gamma + 1;
  const auto e = estimate_drr_jump(ctx, g, radial_field(ctx, g, 0.5 / gp1));
  CHECK(e.target == Approx(1 / gp1));
  CHECK(e.limit == Approx(1 / gp1).epsilon(1e-8));
  CHECK(std::abs(e.drt_limit) < 1e-8);
  CHECK(std::abs(e.dtt_limit) < 1e-8);
  CHECK(e.x.size() == 3);
  // a vanishing field is no evidence either way
  CHECK(estimate_drr_jump(ctx, g, std::vector<double>(g.size(), 0.0)).status == Status::inconclusive);
  CHECK_THROWS_AS(estimate_drr_jump(ctx, g, std::vector<double>(g.size(), 0.0), 1.5), std::invalid_argument);
}

TEST_CASE("parabolic norm: calibration on x^2") {
  const auto ctx = testing::context(89);
  const auto g = testing::grid(ctx, 64);
  const auto c = parabolic_norm_estimate(ctx, g, radial_field(ctx, g, 1.0), 0.2);
  CHECK(c.status == Status::pass);
  CHECK(c.value == Approx(2.0).epsilon(2e-2));
}

TEST_CASE("W11 distance and the diagnostics block") {
  const auto n = testing::context(90);
  const auto gn = testing::grid(n, 32);
  const std::vector<double> zero(gn.size(), 0.0);
  CHECK(w11_distance_to_normal(n, gn, zero) == Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(w11_distance_to_normal(n, gn, zero, 0), std::invalid_argument);
  CHECK_THROWS_AS(w11_distance_to_normal(n, gn, zero, 40, 1.5), std::invalid_argument);
  const auto dn = diagnose(n, gn, zero, CutoffConfig{});
  CHECK(dn.verified());
  CHECK(dn.drr_jump.status == Status::inconclusive);
  CHECK(dn.w11_to_normal.status == Status::pass);

  // the diagnostics are pure: same input, same output, input untouched
  const auto ctx = testing::context(89);
  const auto g = testing::grid(ctx, 48);
  const auto psi = radial_field(ctx, g, 0.5 / (ctx.pot.gas.gamma + 1));
  const auto copy = psi;
  const auto a = diagnose(ctx, g, psi, CutoffConfig{});
  const auto b = diagnose(ctx, g, psi, CutoffConfig{});
  CHECK(psi == copy);
  CHECK(a.psi_x_bound.value == b.psi_x_bound.value);
  CHECK(a.drr.limit == b.drr.limit);
  CHECK(a.w11_to_normal.value == b.w11_to_normal.value);
  CHECK(a.parabolic_norm.value == b.parabolic_norm.value);
  CHECK(a.measured_delta0 == Approx(2 * (1 - a.psi_x_bound.value)));
  // one failed gate is enough to withhold verification
  auto c = a;
  c.ordering.status = Status::pass, c.ellipticity.status = Status::pass, c.psi_x_bound.status = Status::pass;
  c.rh_residual.status = Status::pass, c.fhat_slope.status = Status::pass;
  CHECK(c.verified());
  c.fhat_slope.status = Status::fail;
  CHECK_FALSE(c.verified());
}
