#include "magmeso/energy.hpp"

#include <algorithm>
#include <cmath>

namespace magmeso {

namespace {
double norm(const double* v, int n) {
  double s = 0;
  for (int c = 0; c < n; ++c) s += v[c] * v[c];
  return std::sqrt(s);
}

// Nonnegative root of mu + c mu^{q-1} = a (a >= 0, c >= 0).
double radial_root(double a, double c, double q) {
  if (a <= 0.0) return 0.0;
  if (c == 0.0) return a;
  if (q == 2.0) return a / (1.0 + c);
  double lo = 0.0, hi = a;
  double mu = std::min(a, std::pow(a / c, 1.0 / (q - 1.0)));
  for (int it = 0; it < 200; ++it) {
    const double f = mu + c * std::pow(mu, q - 1.0) - a;
    if (f > 0) hi = mu; else lo = mu;
    if (std::abs(f) <= 1e-15 * a) return mu;
    const double df = 1.0 + c * (q - 1.0) * std::pow(mu, q - 2.0);
    double next = mu - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == mu) return mu;
    mu = next;
  }
  if (hi - lo <= 1e-14 * a) return mu;
  throw SolverError("prox_dissipation: radial Newton iteration did not converge");
}

// Shrinks z towards the origin by `t` in Euclidean norm.
void shrink(const double* z, int n, double t, double* out) {
  const double nz = norm(z, n);
  const double f = nz > t ? (nz - t) / nz : 0.0;
  for (int c = 0; c < n; ++c) out[c] = f * z[c];
}

void scale_radial(double* v, int n, double c, double q) {
  const double nv = norm(v, n);
  if (nv == 0.0) return;
  const double mu = radial_root(nv, c, q);
  for (int c2 = 0; c2 < n; ++c2) v[c2] *= mu / nv;
}

void apply_A(const Eigen::MatrixXd& A, const double* v, int n, double* out) {
  for (int r = 0; r < n; ++r) {
    double s = 0;
    for (int c = 0; c < n; ++c) s += A(r, c) * v[c];
    out[r] = s;
  }
}
}  // namespace

double phi(const double* m, int d, const Material& mat) {
  double n2 = 0;
  for (int c = 0; c < d; ++c) n2 += m[c] * m[c];
  double aniso = 0.0;
  if (mat.beta_aniso > 0 && !mat.easy_axes.empty()) {
    double best = 0.0;
    for (const auto& s : mat.easy_axes) {
      double dot = 0;
      for (int c = 0; c < d; ++c) dot += m[c] * s[c];
      best = std::max(best, dot * dot);
    }
    aniso = mat.beta_aniso * std::max(0.0, n2 - best);
  }
  double v = aniso + mat.b0 * n2 * n2;
  if (mat.b_p > 0) v += mat.b_p * std::pow(n2, 0.5 * mat.p);
  return v;
}

double phi(const std::vector<double>& m, const Material& mat) { return phi(m.data(), static_cast<int>(m.size()), mat); }

double support_S(const double* v, int n, const Material& mat) {
  if (mat.shape == ActivationShape::Ball) return mat.rho * norm(v, n);
  double s = 0;
  for (int c = 0; c < n; ++c) s += mat.rho_box.at(c) * std::abs(v[c]);
  return s;
}

double support_S(const std::vector<double>& v, const Material& mat) {
  return support_S(v.data(), static_cast<int>(v.size()), mat);
}

double rate_support(const double* v, int n, const Material& mat) {
  if (!mat.A_proj) return support_S(v, n, mat);
  double av[8], pv[8];
  apply_A(*mat.A_proj, v, n, av);
  for (int c = 0; c < n; ++c) pv[c] = v[c] - av[c];
  return mat.rho_S2 * norm(av, n) + mat.rho_S1 * norm(pv, n);
}

double viscous_norm(const double* v, int n, const Material& mat) {
  if (!mat.A_proj) return norm(v, n);
  double av[8];
  apply_A(*mat.A_proj, v, n, av);
  return norm(av, n);
}

double dissipation_rate(const double* v, int n, const Material& mat) {
  return rate_support(v, n, mat) + mat.eps_visc * std::pow(viscous_norm(v, n, mat), mat.q);
}

double dissipation_rate(const std::vector<double>& v, const Material& mat) {
  return dissipation_rate(v.data(), static_cast<int>(v.size()), mat);
}

double dissipation_potential(const double* v, int n, const Material& mat) {
  return rate_support(v, n, mat) + mat.eps_visc / mat.q * std::pow(viscous_norm(v, n, mat), mat.q);
}

double dissipation_potential(const std::vector<double>& v, const Material& mat) {
  return dissipation_potential(v.data(), static_cast<int>(v.size()), mat);
}

void prox_dissipation(const double* z, int n, double sigma, const Material& mat, double* out) {
  const double c = sigma * mat.eps_visc;
  if (mat.A_proj) {
    // Orthogonal split: the viscous term and S2 act on range(A), S1 on its complement.
    double za[8], zp[8], va[8], vp[8];
    apply_A(*mat.A_proj, z, n, za);
    for (int k = 0; k < n; ++k) zp[k] = z[k] - za[k];
    shrink(za, n, sigma * mat.rho_S2, va);
    scale_radial(va, n, c, mat.q);
    shrink(zp, n, sigma * mat.rho_S1, vp);
    for (int k = 0; k < n; ++k) out[k] = va[k] + vp[k];
    return;
  }
  if (mat.shape == ActivationShape::Ball) {
    shrink(z, n, sigma * mat.rho, out);
  } else {
    // Componentwise soft threshold, then the same radial equation as the ball.
    for (int k = 0; k < n; ++k) {
      const double t = sigma * mat.rho_box.at(k);
      out[k] = std::abs(z[k]) > t ? std::copysign(std::abs(z[k]) - t, z[k]) : 0.0;
    }
  }
  scale_radial(out, n, c, mat.q);
}

std::vector<double> prox_dissipation(const std::vector<double>& z, double sigma, const Material& mat) {
  if (!(sigma > 0)) throw ConfigError("prox_dissipation: sigma must be > 0");
  std::vector<double> out(z.size());
  prox_dissipation(z.data(), static_cast<int>(z.size()), sigma, mat, out.data());
  return out;
}

double heat_capacity(double theta, const Material& mat) {
  return mat.cv_c0 * std::pow(1.0 + std::max(theta, 0.0), mat.cv_omega - 1.0);
}

double enthalpy_of_theta(double theta, const Material& mat) {
  return mat.cv_c0 * (std::pow(1.0 + theta, mat.cv_omega) - 1.0) / mat.cv_omega;
}

double theta_of_enthalpy(double w, const Material& mat) {
  if (w < 0) return 0.0;
  return std::pow(mat.cv_omega * w / mat.cv_c0 + 1.0, 1.0 / mat.cv_omega) - 1.0;
}

double conductivity(const double* lambda, int n, double w, const Material& mat) {
  if (mat.conductivity == ConductivityModel::Constant) return mat.kappa0;
  const double s = norm(lambda, n) + theta_of_enthalpy(w, mat);
  const double k = mat.kappa0 + (mat.C_K - mat.kappa0) * s / (1.0 + s);
  return std::clamp(k, mat.kappa0, mat.C_K);
}

namespace {
GibbsEvaluation finish_gibbs(double aniso, const VectorField& m, const VectorField& Lnu, const VectorField& lambda,
                             const ScalarField& theta, const VectorField& h, const Operators& ops,
                             const Material& mat) {
  require_same_grid(lambda.grid, m.grid, "gibbs");
  require_same_grid(theta.grid, m.grid, "gibbs");
  require_same_grid(h.grid, m.grid, "gibbs");
  const int d = m.comps;
  if (lambda.comps != d + 1) throw ConfigError("gibbs: lambda must have d+1 components");
  GibbsEvaluation g;
  const double vol = m.grid.cell_volume();
  g.anisotropy = aniso;
  double coup = 0, zee = 0;
  for (std::size_t i = 0; i < m.cells(); ++i) {
    coup += (theta[i] - mat.theta_c) * mat.a0 * lambda.at(i, d);
    for (int c = 0; c < d; ++c) zee -= h.at(i, c) * m.at(i, c);
  }
  g.coupling = coup * vol;
  g.zeeman = zee * vol;
  g.magnetostatic = ops.ms ? ops.ms->energy(m) : 0.0;
  const VectorField r = lambda - Lnu;
  g.penalty = 0.5 * mat.kappa_pen * hminus_inner(ops.poisson, r, r);
  g.total = g.anisotropy + g.coupling + g.magnetostatic + g.zeeman + g.penalty;
  return g;
}
}  // namespace

GibbsEvaluation gibbs_with_field(const AtomicYoungMeasure& nu, const VectorField& lambda, const ScalarField& theta,
                                 const VectorField& h, const Operators& ops, const Material& mat) {
  double aniso = 0;
  for (std::size_t i = 0; i < nu.cells(); ++i)
    for (std::size_t k = nu.offset[i]; k < nu.offset[i + 1]; ++k) aniso += nu.weights[k] * phi(nu.atom(k), nu.d, mat);
  aniso *= nu.grid.cell_volume();
  const MomentPair mp = moments(nu);
  return finish_gibbs(aniso, mp.m, mp.Lnu, lambda, theta, h, ops, mat);
}

GibbsEvaluation gibbs_with_field(const DictMeasure& nu, const VectorField& lambda, const ScalarField& theta,
                                 const VectorField& h, const Operators& ops, const Material& mat) {
  std::vector<double> ph(nu.K());
  for (std::size_t j = 0; j < nu.K(); ++j) ph[j] = phi(nu.dict.atom(j), nu.dict.d, mat);
  double aniso = 0;
  for (std::size_t i = 0; i < nu.cells(); ++i)
    for (std::size_t j = 0; j < nu.K(); ++j) aniso += nu(i, j) * ph[j];
  aniso *= nu.grid.cell_volume();
  const MomentPair mp = moments(nu);
  return finish_gibbs(aniso, mp.m, mp.Lnu, lambda, theta, h, ops, mat);
}

GibbsEvaluation gibbs(double t, const AtomicYoungMeasure& nu, const VectorField& lambda, const ScalarField& theta,
                      const Schedule& schedule, const Operators& ops, const Material& mat) {
  const VectorField h = broadcast(nu.grid, schedule_h(schedule, t));
  return gibbs_with_field(nu, lambda, theta, h, ops, mat);
}

VectorField penalty_gradient(const VectorField& lambda, const VectorField& Lnu, const Operators& ops, double kappa) {
  const VectorField y = ops.poisson.solve(lambda - Lnu);
  return (-kappa) * y;
}

VectorField gibbs_lambda_gradient(const VectorField& lambda, const VectorField& Lnu, const ScalarField& theta,
                                  const Operators& ops, const Material& mat) {
  VectorField g = penalty_gradient(lambda, Lnu, ops, mat.kappa_pen);
  const int last = lambda.comps - 1;
  for (std::size_t i = 0; i < g.cells(); ++i) g.at(i, last) += (theta[i] - mat.theta_c) * mat.a0;
  return g;
}

}  // namespace magmeso
