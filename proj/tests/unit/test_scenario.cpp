#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "magmeso/scenario.hpp"

using namespace magmeso;

namespace {

const char* kMinimal = R"({"grid": {"dim": 1, "n": [8], "length": [1.0]},
  "schedule": {"T_end": 0.2, "tau": 0.05}})";

Config small(double theta0, double h) {
  Config c;
  c.grid = Grid::make_1d(8);
  c.theta0 = theta0;
  c.schedule.tau = 0.05;
  c.schedule.T_end = 0.5;
  c.schedule.h = {{0.0, {h}}};
  c.schedule.theta_ext = {{0.0, theta0}};
  return c;
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("magmeso_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing and defaults") {
  const Config c = parse_config(kMinimal);
  CHECK(c.grid.cells() == 8);
  CHECK(c.schedule.steps() == 4);
  CHECK(c.mat.a0 == 2.0);
  REQUIRE(c.schedule.theta_ext.size() == 1);
  CHECK(c.schedule.theta_ext[0].value == c.theta0);
  REQUIRE(c.schedule.h.size() == 1);
  CHECK(c.schedule.h[0].value == std::vector<double>{0.0});

  const Config full = parse_config(R"({"grid": {"dim": 2, "n": [4, 3], "length": [1, 0.5]},
    "material": {"shape": "box", "rho_box": [0.1, 0.2, 0.3], "conductivity": "clamped", "C_K": 2,
                 "A_proj": [[1,0,0],[0,1,0],[0,0,1]], "easy_axes": [[1, 0]]},
    "schedule": {"T_end": 1, "tau": 0.1, "h": [{"t": 0, "value": [0, 0.1]}]},
    "solver": {"reg_weight": 0, "order": "lambda_first"},
    "run": {"kappa_ladder": [1, 2], "period": 0.5}})");
  CHECK(full.grid.dim == 2);
  CHECK(full.mat.shape == ActivationShape::Box);
  CHECK(full.mat.conductivity == ConductivityModel::Clamped);
  CHECK(full.mat.A_proj.has_value());
  CHECK(!full.inc.nu_first);
  CHECK(full.run.kappa_ladder.size() == 2);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"dim": 1, "n": [8]}, "schedule": {"T_end": 1, "tau": 0.1}, "extra": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"dim": 1, "n": [8], "bogus": 2}, "schedule": {"T_end": 1, "tau": 0.1}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"dim": 3, "n": [8]}, "schedule": {"T_end": 1, "tau": 0.1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"dim": 1, "n": [8]}, "material": {"p": 3},
                                   "schedule": {"T_end": 1, "tau": 0.1}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"dim": 1, "n": [8]}, "schedule": {"T_end": 1, "tau": 0.1, "b": -1}})"),
                  ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("paramagnetic run stays unmagnetised") {
  Config c = small(1.5, 0.0);
  c.schedule.T_end = 2.0;
  c.schedule.b = 1.0;
  c.schedule.theta_ext = {{0.0, 1.2}};
  const EvolveResult r = evolve(c);
  CHECK(r.verdict.pass);
  for (const auto& s : r.traj.steps) CHECK(std::abs(s.mean_m[0]) <= 1e-9);
  // The first steps release the coupling force on lambda (cooling); afterwards
  // the temperature drifts back toward the exterior value.
  const auto& st = r.traj.steps;
  CHECK(st[1].dissipation > st.back().dissipation);
  for (std::size_t k = 5; k < st.size(); ++k) {
    CHECK(st[k].mean_theta >= st[k - 1].mean_theta - 1e-12);
    CHECK(st[k].mean_theta <= 1.2);
  }
}

TEST_CASE("equilibrium start at the Curie temperature does not move") {
  Config c = small(1.0, 0.0);
  c.inc.reg_weight = 0.0;
  c.schedule.theta_ext = {{0.0, 1.0}};
  c.schedule.b = 1.0;
  const EvolveResult r = evolve(c);
  for (const auto& s : r.traj.steps) {
    CHECK(s.dissipation <= 1e-12);
    CHECK(s.mean_theta == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("adiabatic cycling: heat content follows the bookkeeping") {
  Config c = small(0.5, 0.0);
  c.schedule.b = 0.0;
  c.schedule.h = {{0.0, {0.0}}, {0.25, {0.5}}, {0.5, {-0.5}}};
  const EvolveResult r = evolve(c);
  CHECK(r.verdict.pass);
  for (std::size_t k = 1; k < r.traj.steps.size(); ++k) CHECK(std::abs(r.traj.steps[k].heat_bookkeeping) <= 1e-9 * std::max(1.0, r.traj.steps[k].heat_content));
}

TEST_CASE("one step equals direct calls") {
  Config c = small(0.7, 0.3);
  c.schedule.T_end = 0.05;
  c.schedule.b = 0.5;
  const EvolveResult r = evolve(c);
  REQUIRE(r.traj.steps.size() == 2);

  const Operators ops(c.grid, c.mat.mu0, c.mat.pad_factor, c.mat.magnetostatics, c.elliptic);
  const Dictionary dict = make_dictionary(c);
  const State s0 = initial_state(c, ops, dict);
  IncrementProblem p;
  p.k = 1;
  p.tau = c.schedule.tau;
  p.prev = s0;
  p.w_prev = ScalarField(c.grid, enthalpy_of_theta(c.theta0, c.mat));
  p.h = broadcast(c.grid, schedule_h(c.schedule, 0.05));
  p.mat = &c.mat;
  p.ops = &ops;
  p.opt = c.inc;
  const IncrementSolution sol = incremental_solve(p);
  HeatStepProblem hp;
  hp.tau = p.tau;
  hp.w_prev = p.w_prev;
  hp.lambda_new = sol.state.lambda;
  hp.lambda_prev = s0.lambda;
  hp.mat = &c.mat;
  hp.b = c.schedule.b;
  hp.theta_ext = schedule_theta_ext(c.schedule, 0.05);
  const HeatStepResult hr = heat_step(hp);
  CHECK(r.final_state.lambda.values == sol.state.lambda.values);
  CHECK(r.traj.steps[1].w.values == hr.w.values);
}

TEST_CASE("kappa sweep closes the constraint gap") {
  Config c = small(0.5, 0.2);
  c.run.kappa_ladder = {1, 4, 16, 64};
  const auto rows = kappa_sweep(c);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].gap <= rows[i - 1].gap * (1 + 1e-6));
    CHECK(rows[i].objective >= rows[i - 1].objective - 1e-9);
  }
  CHECK(kappa_sweep(small(0.5, 0.2)).size() == 8);
}

TEST_CASE("hysteresis collapses without a threshold") {
  auto cfg = [](double rho, double eps) {
    Config c;
    c.grid = Grid::make_1d(2);
    c.mat.rho = rho;
    c.mat.eps_visc = eps;
    c.mat.kappa_pen = 10.0;
    c.mat.magnetostatics = false;
    c.theta0 = 0.5;
    c.inc.reg_weight = 0.0;
    c.run.isothermal = true;
    c.run.period = 1.0;
    c.schedule.tau = 0.01;
    c.schedule.T_end = 2.0;
    c.schedule.h = {{0.0, {0.0}}, {0.25, {0.3}}, {0.75, {-0.3}}, {1.25, {0.3}}, {1.75, {-0.3}}, {2.0, {0.0}}};
    c.schedule.theta_ext = {{0.0, 0.5}};
    return c;
  };
  // Without a threshold the remaining loop is viscous lag and shrinks with eps.
  const HysteresisResult with = hysteresis(cfg(0.1, 1e-4));
  const HysteresisResult without = hysteresis(cfg(0.0, 1e-4));
  const HysteresisResult viscous = hysteresis(cfg(0.0, 1e-2));
  CHECK(with.area > 0);
  CHECK(without.area < 0.2 * with.area);
  CHECK(without.area < 0.5 * viscous.area);
  CHECK(without.ri_direct == 0.0);
  Config bad = cfg(0.1, 1e-2);
  bad.run.period = 0.0;
  CHECK_THROWS_AS(hysteresis(bad), ConfigError);
}

TEST_CASE("frozen inputs: tau study distances vanish") {
  Config c = small(1.0, 0.2);
  c.inc.reg_weight = 0.0;
  c.schedule.T_end = 0.4;
  c.schedule.theta_ext = {{0.0, 1.0}};
  c.run.tau_levels = 3;
  c.run.tau_coarse = 0.1;
  c.run.checkpoints = 4;
  const TauStudy st = tau_study(c);
  REQUIRE(st.dist_lambda.size() == 2);
  for (double d : st.dist_lambda) CHECK(d <= 1e-9);
  for (double d : st.dist_w) CHECK(d <= 1e-9);
}

TEST_CASE("curie sweep") {
  Config c = small(0.5, 0.0);
  c.mat.magnetostatics = false;
  c.mat.kappa_pen = 20.0;
  c.run.theta_values = {0.25, 0.5, 1.5};
  const auto rows = curie_sweep(c);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].mean_second > rows[1].mean_second);
  CHECK(rows[1].mean_second > rows[2].mean_second);
  CHECK(rows[2].mean_second <= 1e-6);
}

TEST_CASE("drivers write their tables deterministically") {
  Config c = small(0.6, 0.3);
  c.run.snapshot_every = 2;
  const auto a = scratch("a"), b = scratch("b");
  std::streambuf* old = std::cout.rdbuf();
  std::ostringstream sink;
  std::cout.rdbuf(sink.rdbuf());
  const int ra = run_evolve(c, a.string());
  const int rb = run_evolve(c, b.string());
  const int rs = run_static(c, (a / "static").string());
  std::cout.rdbuf(old);
  CHECK(ra == 0);
  CHECK(rb == 0);
  CHECK(rs == 0);
  for (const char* f : {"series.csv", "audit.csv", "monitors.csv", "verdict.txt"}) {
    std::ifstream fa(a / f), fb(b / f);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(!sa.str().empty());
    CHECK(sa.str() == sb.str());
  }
  CHECK(std::filesystem::exists(a / "snapshots" / "lambda_00002.txt"));
  CHECK(std::filesystem::exists(a / "static" / "static.csv"));
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST_CASE("field snapshot header") {
  std::ostringstream os;
  write_field_snapshot(os, "w", ScalarField(Grid::make_1d(3), 1.0), 0.25);
  const std::string s = os.str();
  CHECK(s.rfind("# field=w", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 5);
}
