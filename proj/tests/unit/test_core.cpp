#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "magmeso/core.hpp"

using namespace magmeso;

namespace {
bool has_field(const std::vector<Violation>& v, const std::string& f) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.field == f; });
}
}  // namespace

TEST_CASE("grid geometry") {
  const Grid g = Grid::make_2d(4, 5, 2.0, 1.0);
  CHECK(g.cells() == 20);
  CHECK(g.cell_volume() == doctest::Approx(0.5 * 0.2));
  CHECK(g.center(0)[0] == doctest::Approx(0.25));
  CHECK(g.center(g.index(3, 4))[1] == doctest::Approx(0.9));
  CHECK_THROWS_AS(Grid::make_1d(1), ConfigError);
  CHECK_THROWS_AS(Grid::make_1d(4, -1.0), ConfigError);
}

TEST_CASE("field arithmetic keeps the grid and rejects mixing") {
  const Grid a = Grid::make_1d(4), b = Grid::make_1d(5);
  ScalarField x(a, 1.0), y(a, 2.0), z(b, 1.0);
  const ScalarField s = x + y;
  CHECK(s.grid == a);
  CHECK(s[3] == 3.0);
  CHECK_THROWS_AS(x + z, ConfigError);
  VectorField u(a, 2, 1.0), v(b, 2, 1.0);
  CHECK_THROWS_AS(u - v, ConfigError);
  CHECK_THROWS_AS(ScalarField(a, std::vector<double>(3)), ConfigError);
  CHECK(integrate(ScalarField(a, 2.0)) == doctest::Approx(2.0));
}

TEST_CASE("validate_material examples") {
  Material m;
  m.q = 2;
  m.cv_omega = 2;
  CHECK(validate_material(m).empty());

  Material p = m;
  p.p = 3;
  p.b_p = 1e-3;
  CHECK(has_field(validate_material(p), "p"));

  Material r = m;
  r.rho = 0;
  r.eps_visc = 1;
  CHECK(validate_material(r).empty());

  Material w = m;
  w.q = 3;
  w.cv_omega = 1.2;  // below q' = 1.5
  CHECK(has_field(validate_material(w), "cv_omega"));

  Material k = m;
  k.C_K = 0.5 * k.kappa0;
  CHECK(!validate_material(k).empty());
}

TEST_CASE("validate_material is pure and checks the projector") {
  Material m;
  m.easy_axes = {{0.6, 0.8}};
  CHECK(validate_material(m, 2).empty());
  CHECK(validate_material(m, 2) == validate_material(m, 2));
  Material bad = m;
  bad.easy_axes = {{1.0, 1.0}};
  CHECK(has_field(validate_material(bad, 2), "easy_axes"));

  Material a;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  A(1, 1) = 1.0;
  a.A_proj = A;
  CHECK(validate_material(a, 1).empty());
  // Kernel contains e_last, which the coupling does not annihilate.
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2, 2);
  B(0, 0) = 1.0;
  a.A_proj = B;
  CHECK(has_field(validate_material(a, 1), "A_proj"));
  // Not idempotent.
  a.A_proj = 2.0 * A;
  CHECK(has_field(validate_material(a, 1), "A_proj"));
}

TEST_CASE("schedule sampling") {
  Schedule s;
  s.T_end = 1.0;
  s.h = {{0.0, {0.0}}, {1.0, {0.8}}};
  s.theta_ext = {{0.0, 0.3}};
  const Grid g = Grid::make_1d(3);
  const ScheduleSample mid = sample_schedule(s, g, 0.5);
  CHECK(mid.h.at(1, 0) == doctest::Approx(0.4));
  CHECK(mid.hdot.at(2, 0) == doctest::Approx(0.8));
  CHECK(mid.theta_ext == doctest::Approx(0.3));
  CHECK_THROWS_AS(sample_schedule(s, g, 1.5), ConfigError);
  CHECK_THROWS_AS(sample_schedule(s, g, -0.1), ConfigError);

  Schedule c;
  c.h = {{0.0, {0.2}}};
  CHECK(schedule_hdot(c, 0.3)[0] == 0.0);

  // Right-continuous slope at a keyframe, continuous value.
  Schedule k;
  k.T_end = 2.0;
  k.h = {{0.0, {0.0}}, {1.0, {1.0}}, {2.0, {0.0}}};
  CHECK(schedule_hdot(k, 1.0 - 1e-9)[0] == doctest::Approx(1.0));
  CHECK(schedule_hdot(k, 1.0)[0] == doctest::Approx(-1.0));
  CHECK(schedule_h(k, 1.0 - 1e-9)[0] == doctest::Approx(schedule_h(k, 1.0 + 1e-9)[0]).epsilon(1e-8));
}

TEST_CASE("schedule validation") {
  Schedule s;
  s.h = {{0.0, {0.0}}, {0.0, {1.0}}};
  CHECK_THROWS_AS(s.validate(1), ConfigError);
  s.h = {{0.0, {0.0}}};
  s.theta_ext = {{0.0, -1.0}};
  CHECK_THROWS_AS(s.validate(1), ConfigError);
  s.theta_ext = {{0.0, 1.0}};
  s.b = -0.1;
  CHECK_THROWS_AS(s.validate(1), ConfigError);
  s.b = 0.0;
  s.h = {{0.0, {0.0, 1.0}}};
  CHECK_THROWS_AS(s.validate(1), ConfigError);
  CHECK_NOTHROW(s.validate(2));
}

TEST_CASE("rng is reproducible and in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  Rng c(1);
  for (int i = 0; i < 100; ++i) CHECK(c.index(7) < 7);
}
