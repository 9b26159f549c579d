#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "srd/io.hpp"
#include "support.hpp"

using namespace srd;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("srd_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

RunConfig small_run() {
  RunConfig c;
  c.rho1 = 2.0;
  c.theta_w_deg = 89;
  c.nx = c.ny = 24;
  c.outer_tol = 1e-9;
  c.outer_max_iter = 200;
  return c;
}

Solution write_artifact(const RunConfig& c, const fs::path& dir) {
  write_text(dir / "config.json", to_json(c).dump(2) + "\n");
  const auto s = solve(c.gas(), c.resolved_rho1(), c.theta_w(), c.solve_config());
  write_text(dir / "fields.csv", fields_csv(s));
  write_text(dir / "shock.csv", shock_csv(s, c.near_arc_width));
  return s;
}

}  // namespace

TEST_CASE("run configuration: validation names the violated inequality") {
  RunConfig c;
  c.rho1 = 0.5;
  try {
    c.validate();
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("rho1 > rho0") != std::string::npos);
  }
  c.rho1.reset();
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);  // neither rho1 nor m1
  c.m1 = 0.6;
  CHECK_NOTHROW(c.validate());
  CHECK(c.resolved_rho1() == Approx(rho1_from_m1(GasParams{}, 0.6)));
  c.inner = "gmres";
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("run configuration: JSON round trip and merge") {
  auto c = small_run();
  c.lambda = 0.25;
  const auto back = merge_json(RunConfig{}, to_json(c));
  CHECK(to_json(back) == to_json(c));
  const auto m = merge_json(c, nlohmann::json{{"nx", 40}, {"theta_w_deg", 85.0}});
  CHECK(m.nx == 40);
  CHECK(m.ny == 24);
  CHECK(m.theta_w_deg == 85.0);
  CHECK_THROWS_AS(merge_json(c, nlohmann::json{{"thetaw", 85.0}}), std::invalid_argument);
  CHECK(fmt(0.1) == "0.10000000000000001");
}

TEST_CASE("local report and transition CSV") {
  RunConfig c;
  c.rho1 = 2.0;
  c.theta_w_deg = 85;
  const auto j = local_report(c);
  for (const char* k : {"input", "euler_incident", "normal_reflection", "potential_incident",
                        "potential_normal_reflection", "state_two", "transition"})
    CHECK(j.contains(k));
  CHECK(j["transition"]["theta_s_deg"].get<double>() == Approx(50.011228812239253).epsilon(1e-10));
  const auto csv = curves_csv(transition_curve(GasParams{}, SweepParameter::rho1, 1.5, 4.0, 3));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "parameter,theta_d_deg,theta_s_deg,gap_deg,status");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.substr(line.rfind(',') + 1) == "ok");
  }
  CHECK(rows == 3);
}

TEST_CASE("artifact: write, reload, re-verify, detect corruption") {
  const auto dir = scratch_dir("artifact");
  const auto c = small_run();
  const auto s = write_artifact(c, dir);
  REQUIRE(s.report.converged);
  const auto a = load_artifact(dir);
  REQUIRE(a.grid.size() == s.grid.size());
  double dp = 0, dx = 0;
  for (std::size_t k = 0; k < a.psi.size(); ++k) {
    dp = std::max(dp, std::abs(a.psi[k] - s.psi[k]));
    dx = std::max(dx, std::hypot(a.grid.p[k][0] - s.grid.p[k][0], a.grid.p[k][1] - s.grid.p[k][1]));
  }
  CHECK(dp < 1e-14);
  CHECK(dx < 1e-13);
  const auto d = diagnose(a.ctx, a.grid, a.psi, a.cfg.solve_config().cutoff);
  CHECK(d.verified() == s.report.diagnostics.verified());
  CHECK(d.psi_x_bound.value == Approx(s.report.diagnostics.psi_x_bound.value).epsilon(1e-10));

  // lower phi at one interior node below phi2: ordering must fail on reload
  auto text = slurp(dir / "fields.csv");
  std::istringstream in(text);
  std::string out, line;
  int ln = 0;
  const std::string target = std::to_string(a.grid.nx / 2) + "," + std::to_string(a.grid.ny / 2) + ",";
  while (std::getline(in, line)) {
    ++ln;
    if (line.rfind(target, 0) == 0) {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
      cells[6] = fmt(std::stod(cells[6]) - 0.1);
      line.clear();
      for (std::size_t k = 0; k < cells.size(); ++k) line += (k ? "," : "") + cells[k];
    }
    out += line + "\n";
  }
  write_text(dir / "fields.csv", out);
  const auto bad = load_artifact(dir);
  CHECK(check_ordering(bad.ctx, bad.grid, bad.psi).status == Status::fail);
  CHECK_FALSE(diagnose(bad.ctx, bad.grid, bad.psi, bad.cfg.solve_config().cutoff).verified());

  // a malformed cell is reported with file and line
  write_text(dir / "fields.csv", text.substr(0, text.find('\n', text.find('\n') + 1) + 1) + "0,1,abc,0,0,0,0,0,0,0\n");
  try {
    load_artifact(dir);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("fields.csv:3") != std::string::npos);
  }
  fs::remove(dir / "shock.csv");
  CHECK_THROWS_AS(load_artifact(dir), ParseError);
  fs::remove_all(dir);
}
