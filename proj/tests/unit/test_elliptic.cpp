#include "doctest.h"

#include <cmath>
#include <numbers>

#include "magmeso/elliptic.hpp"

using namespace magmeso;

namespace {
VectorField random_field(const Grid& g, int k, Rng& rng) {
  VectorField f(g, k);
  for (double& x : f.values) x = rng.uniform(-1, 1);
  return f;
}
}  // namespace

TEST_CASE("dirichlet solve: zero and quadratic") {
  const Grid g = Grid::make_1d(64);
  const DirichletPoisson P(g);
  for (double x : P.solve(std::vector<double>(64, 0.0))) CHECK(x == 0.0);
  // f = -1 gives x(1-x)/2; the 3-point stencil is exact on quadratics away
  // from the boundary, the ghost reflection costs O(h^2).
  const auto u = P.solve(std::vector<double>(64, -1.0));
  double umax = 0;
  for (std::size_t i = 0; i < 64; ++i) {
    const double x = g.center(i)[0];
    CHECK(u[i] == doctest::Approx(x * (1 - x) / 2).epsilon(1e-3));
    umax = std::max(umax, u[i]);
  }
  CHECK(umax == doctest::Approx(0.125).epsilon(1e-3));
}

TEST_CASE("dirichlet solve: residual, linearity, symmetry") {
  Rng rng(5);
  for (const Grid& g : {Grid::make_1d(40), Grid::make_2d(12, 9, 1.0, 0.7)}) {
    const DirichletPoisson P(g);
    const VectorField f = random_field(g, 1, rng), h = random_field(g, 1, rng);
    const auto u = P.solve(f.values);
    const auto Au = P.apply(u);
    double r = 0, n = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      r = std::max(r, std::abs(Au[i] - f.values[i]));
      n = std::max(n, std::abs(f.values[i]));
    }
    CHECK(r <= 1e-10 * n);
    const auto uh = P.solve(h.values);
    const auto us = P.solve((f + 2.0 * h).values);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(us[i] == doctest::Approx(u[i] + 2 * uh[i]).epsilon(1e-10));
    double a = 0, b = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      a += u[i] * h.values[i];
      b += f.values[i] * uh[i];
    }
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("hminus inner product") {
  Rng rng(9);
  const Grid g = Grid::make_2d(10, 8);
  const DirichletPoisson P(g);
  const VectorField f = random_field(g, 3, rng), h = random_field(g, 3, rng);
  CHECK(hminus_norm(P, VectorField(g, 3)) == 0.0);
  CHECK(hminus_norm(P, 2.0 * f) == doctest::Approx(2 * hminus_norm(P, f)).epsilon(1e-14));
  CHECK(hminus_inner(P, f, h) == doctest::Approx(hminus_inner(P, h, f)).epsilon(1e-12));
  CHECK(hminus_norm(P, f) * hminus_norm(P, f) == doctest::Approx(hminus_inner(P, f, f)));
  // Green identity: <<f,g>> = -<Lap^-1 f, g>.
  const VectorField u = P.solve(f);
  CHECK(hminus_inner(P, f, h) == doctest::Approx(-l2_inner(u, h)).epsilon(1e-12));

  const Grid g1 = Grid::make_1d(256);
  const DirichletPoisson P1(g1);
  VectorField s(g1, 1);
  for (int i = 0; i < 256; ++i) s.values[i] = std::sin(std::numbers::pi * g1.center(i)[0]);
  CHECK(hminus_norm(P1, s) == doctest::Approx(1 / (std::numbers::pi * std::sqrt(2.0))).epsilon(1e-4));
}

TEST_CASE("inverse diagonal matches solves") {
  const Grid g = Grid::make_2d(5, 4);
  const DirichletPoisson P(g);
  const auto& d = P.inverse_diagonal();
  for (std::size_t i = 0; i < g.cells(); i += 3) {
    std::vector<double> e(g.cells(), 0.0);
    e[i] = -1.0;
    CHECK(P.solve(e)[i] == doctest::Approx(d[i]).epsilon(1e-12));
  }
}

TEST_CASE("spd solver paths agree") {
  const Grid g = Grid::make_2d(20, 20);
  EllipticOptions iter;
  iter.direct_limit = 10;
  const DirichletPoisson A(g), B(g, iter);
  CHECK(A.direct());
  CHECK(!B.direct());
  Rng rng(1);
  const VectorField f = random_field(g, 1, rng);
  const auto ua = A.solve(f.values), ub = B.solve(f.values);
  for (std::size_t i = 0; i < ua.size(); ++i) CHECK(ub[i] == doctest::Approx(ua[i]).epsilon(1e-9));
}

TEST_CASE("magnetostatics") {
  const Grid g = Grid::make_1d(16);
  const MagnetostaticSolver ms(g, 2.0, 4.0);
  const MagnetostaticResult z = ms.solve(VectorField(g, 1));
  CHECK(z.energy == 0.0);
  for (double u : z.u) CHECK(u == 0.0);
  const VectorField h = ms.field(broadcast(g, {0.6}));
  for (std::size_t i = 0; i < g.cells(); ++i) CHECK(h.at(i, 0) == doctest::Approx(0.3).epsilon(1e-10));

  Rng rng(3);
  const Grid g2 = Grid::make_2d(8, 8);
  const MagnetostaticSolver ms2(g2, 1.0, 2.0);
  for (int it = 0; it < 5; ++it) {
    const VectorField m = random_field(g2, 2, rng);
    const double e = ms2.energy(m);
    CHECK(e >= -1e-12);
    CHECK(ms2.energy(3.0 * m) == doctest::Approx(9 * e).epsilon(1e-10));
  }
  CHECK(ms2.pad_cells(0) > 0);
}
