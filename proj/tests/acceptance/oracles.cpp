#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

double uniform_hminus_factor() {
  const double h = 0.5;
  return h * h / 2.0;
}

double phi(const SingleCell& s, double m) {
  const double m2 = m * m;
  return s.b0 * m2 * m2 + s.b_p * std::pow(std::abs(m), s.p);
}

namespace {

double weighted(const SingleCell& s, const std::array<double, 2>& lambda, const double* w, const int* idx, int k) {
  double m = 0, mu = 0, ph = 0;
  for (int a = 0; a < k; ++a) {
    const double x = s.atoms[idx[a]];
    m += w[a] * x;
    mu += w[a] * x * x;
    ph += w[a] * phi(s, x);
  }
  const double kg = s.kappa * uniform_hminus_factor();
  return ph - s.h * m + m * m / (2.0 * s.mu0) +
         0.5 * kg * ((lambda[0] - m) * (lambda[0] - m) + (lambda[1] - mu) * (lambda[1] - mu));
}

}  // namespace

double inner_min(const SingleCell& s, const std::array<double, 2>& lambda) {
  const int K = static_cast<int>(s.atoms.size());
  double best = std::numeric_limits<double>::infinity();
  // Segments between two atoms (vertices included): the objective is a
  // quadratic in the weight, recovered from three samples.
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K; ++j) {
      const int idx[2] = {i, j};
      auto f = [&](double t) {
        const double w[2] = {1 - t, t};
        return weighted(s, lambda, w, idx, 2);
      };
      const double f0 = f(0), fh = f(0.5), f1 = f(1);
      const double A = 2 * (f0 - 2 * fh + f1), B = -3 * f0 + 4 * fh - f1;
      best = std::min({best, f0, f1});
      if (A > 0) {
        const double t = -B / (2 * A);
        if (t > 0 && t < 1) best = std::min(best, f(t));
      }
    }
  // Interior points of atom triangles: stationary point of the quadratic in
  // two free weights, kept only when feasible.
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K; ++j)
      for (int k = j + 1; k < K; ++k) {
        const int idx[3] = {i, j, k};
        auto f = [&](double x, double y) {
          const double w[3] = {x, y, 1 - x - y};
          return weighted(s, lambda, w, idx, 3);
        };
        // Exact quadratic: recover gradient and Hessian from samples.
        const double c = f(0, 0);
        const double fx = f(1, 0), fy = f(0, 1), fxy = f(1, 1), fmx = f(-1, 0), fmy = f(0, -1);
        const double hxx = fx + fmx - 2 * c, hyy = fy + fmy - 2 * c;
        const double gx = 0.5 * (fx - fmx), gy = 0.5 * (fy - fmy);
        const double hxy = fxy - c - gx - gy - 0.5 * hxx - 0.5 * hyy;
        const double det = hxx * hyy - hxy * hxy;
        if (!(det > 1e-300)) continue;
        const double x = (-gx * hyy + gy * hxy) / det;
        const double y = (-gy * hxx + gx * hxy) / det;
        if (x >= 0 && y >= 0 && x + y <= 1) best = std::min(best, f(x, y));
      }
  return best;
}

namespace {

template <class F>
Result minimise_lambda(F&& J, std::array<double, 2> centre) {
  const double B = 100.0, tol = 1e-9;
  double l0 = 0;
  auto outer = [&](double x) {
    return golden([&](double y) { return J({x, y}); }, centre[1] - B, centre[1] + B, tol);
  };
  const double val = golden(outer, centre[0] - B, centre[0] + B, tol, &l0);
  double l1 = 0;
  golden([&](double y) { return J({l0, y}); }, centre[1] - B, centre[1] + B, tol, &l1);
  return {val, {l0, l1}};
}

}  // namespace

Result incremental_min(const SingleCell& s) {
  const double a = (s.theta - s.theta_c) * s.a0;
  auto J = [&](const std::array<double, 2>& l) {
    const double v0 = (l[0] - s.lambda_prev[0]) / s.tau, v1 = (l[1] - s.lambda_prev[1]) / s.tau;
    const double v = std::sqrt(v0 * v0 + v1 * v1);
    const double n2 = l[0] * l[0] + l[1] * l[1];
    return inner_min(s, l) + a * l[1] + s.tau * (s.reg * n2 * n2 + s.rho * v + 0.5 * s.eps * v * v);
  };
  return minimise_lambda(J, s.lambda_prev);
}

Result static_min(const SingleCell& s) {
  const double a = (s.theta - s.theta_c) * s.a0;
  auto J = [&](const std::array<double, 2>& l) { return inner_min(s, l) + a * l[1]; };
  return minimise_lambda(J, {0.0, 0.0});
}

}  // namespace oracle
