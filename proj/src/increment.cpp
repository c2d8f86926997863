#include "magmeso/increment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "magmeso/audit.hpp"

namespace magmeso {

ScalarField IncrementProblem::theta() const {
  ScalarField th(w_prev.grid);
  for (std::size_t i = 0; i < th.size(); ++i) th[i] = theta_of_enthalpy(w_prev[i], *mat);
  return th;
}

namespace {

// Everything the two sub-steps need, precomputed once per problem.
struct Ctx {
  Grid grid;
  int d = 1;
  std::size_t N = 0, K = 0;
  double vol = 0;
  const Dictionary* dict = nullptr;
  std::vector<double> phij, n2j;
  const VectorField* h = nullptr;
  std::vector<double> a;  // (theta - theta_c) a0 per cell
  const Material* mat = nullptr;
  const Operators* ops = nullptr;
  double kappa = 1;
  bool dynamic = false;
  double tau = 0;
  const VectorField* lambda_prev = nullptr;
  double reg = 0;
  IncrementOptions opt;
};

Ctx make_ctx(const Material& mat, const Operators& ops, const Dictionary& dict, const VectorField& h,
             const ScalarField& theta, double kappa, const IncrementOptions& opt) {
  Ctx c;
  c.grid = ops.grid;
  c.d = c.grid.dim;
  c.N = c.grid.cells();
  c.K = dict.size();
  c.vol = c.grid.cell_volume();
  c.dict = &dict;
  if (dict.d != c.d) throw ConfigError("increment: dictionary dimension must equal grid dimension");
  require_same_grid(h.grid, c.grid, "increment");
  require_same_grid(theta.grid, c.grid, "increment");
  for (std::size_t j = 0; j < c.K; ++j) {
    c.phij.push_back(phi(dict.atom(j), c.d, mat));
    c.n2j.push_back(dict.norm2(j));
  }
  c.h = &h;
  c.a.resize(c.N);
  for (std::size_t i = 0; i < c.N; ++i) c.a[i] = (theta[i] - mat.theta_c) * mat.a0;
  c.mat = &mat;
  c.ops = &ops;
  c.kappa = kappa;
  c.opt = opt;
  return c;
}

Ctx make_ctx(const IncrementProblem& p, ScalarField& theta_store) {
  if (!p.mat || !p.ops) throw ConfigError("increment: material and operators required");
  if (!(p.tau > 0)) throw ConfigError("increment: tau must be > 0");
  theta_store = p.theta();
  Ctx c = make_ctx(*p.mat, *p.ops, p.prev.nu.dict, p.h, theta_store, p.mat->kappa_pen, p.opt);
  require_same_grid(p.prev.lambda.grid, c.grid, "increment");
  if (p.prev.lambda.comps != c.d + 1) throw ConfigError("increment: lambda must have d+1 components");
  c.dynamic = true;
  c.tau = p.tau;
  c.lambda_prev = &p.prev.lambda;
  c.reg = p.opt.reg_weight;
  return c;
}

struct LambdaTerms {
  double coupling = 0, reg = 0, diss = 0;
};

LambdaTerms lambda_terms(const Ctx& c, const VectorField& lambda) {
  LambdaTerms t;
  const int n = c.d + 1;
  for (std::size_t i = 0; i < c.N; ++i) {
    t.coupling += c.a[i] * lambda.at(i, c.d);
    if (c.dynamic) {
      double n2 = 0, v[8];
      for (int k = 0; k < n; ++k) {
        n2 += lambda.at(i, k) * lambda.at(i, k);
        v[k] = (lambda.at(i, k) - c.lambda_prev->at(i, k)) / c.tau;
      }
      if (c.reg > 0) t.reg += std::pow(n2, c.mat->q);
      t.diss += dissipation_potential(v, n, *c.mat);
    }
  }
  t.coupling *= c.vol;
  t.reg *= c.tau * c.reg * c.vol;
  t.diss *= c.tau * c.vol;
  return t;
}

double full_objective(const Ctx& c, const DictMeasure& nu, const VectorField& lambda, GibbsEvaluation* parts,
                      LambdaTerms* lt) {
  const MomentPair mp = moments(nu);
  GibbsEvaluation g;
  double aniso = 0, zee = 0;
  for (std::size_t i = 0; i < c.N; ++i) {
    for (std::size_t j = 0; j < c.K; ++j) aniso += nu(i, j) * c.phij[j];
    for (int k = 0; k < c.d; ++k) zee -= c.h->at(i, k) * mp.m.at(i, k);
  }
  g.anisotropy = aniso * c.vol;
  g.zeeman = zee * c.vol;
  g.magnetostatic = c.ops->ms ? c.ops->ms->energy(mp.m) : 0.0;
  const VectorField r = lambda - mp.Lnu;
  g.penalty = 0.5 * c.kappa * hminus_inner(c.ops->poisson, r, r);
  const LambdaTerms t = lambda_terms(c, lambda);
  g.coupling = t.coupling;
  g.total = g.anisotropy + g.coupling + g.magnetostatic + g.zeeman + g.penalty;
  if (parts) *parts = g;
  if (lt) *lt = t;
  return g.total + t.reg + t.diss;
}

// Frank-Wolfe over the product of per-cell simplices. Each cell moves either
// along the classical FW direction or along a pairwise (away-to-toward)
// direction, scaled by a step from a diagonal model of the quadratic part;
// the combined direction then gets an exact line search. With `reduced` the
// penalty is replaced by its minimum over lambda (static case).
StepReport fw_minimize(const Ctx& c, DictMeasure& nu, const VectorField* lambda, bool reduced, double lambda_const) {
  const int d = c.d;
  const int n = d + 1;
  const std::size_t N = c.N, K = c.K;
  const bool with_pen = !reduced;
  StepReport rep;

  MomentPair mp;
  VectorField hd, y;
  auto refresh = [&]() {
    mp = moments(nu);
    hd = c.ops->h_dem(mp.m);
    if (with_pen) y = c.ops->poisson.solve(*lambda - mp.Lnu);
  };
  refresh();

  // Diagonal curvature bounds of the quadratic part in the moments.
  const double cm = c.ops->ms ? c.vol / c.mat->mu0 : 0.0;
  std::vector<double> cp(N, 0.0);
  if (with_pen) {
    const std::vector<double>& gi = c.ops->poisson.inverse_diagonal();
    for (std::size_t i = 0; i < N; ++i) cp[i] = c.kappa * c.vol * gi[i];
  }

  std::vector<double> G(K);
  std::vector<int> kind(N);
  std::vector<std::size_t> jp(N), jm(N);
  std::vector<double> wminus(N), gam(N);
  VectorField mD(c.grid, d), LD(c.grid, n);

  for (int it = 0;; ++it) {
    if (it > 0 && it % 25 == 0) refresh();
    double f = 0, gap = 0, slope = 0, gmax = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double* w = nu.w.data() + i * K;
      double lin[2];
      for (int k = 0; k < d; ++k) lin[k] = -c.h->at(i, k) + hd.at(i, k) + (with_pen ? c.kappa * y.at(i, k) : 0.0);
      const double quad = reduced ? c.a[i] : c.kappa * y.at(i, d);
      double best = std::numeric_limits<double>::infinity(), worst = -best, wg = 0;
      std::size_t jb = 0, jw = 0;
      for (std::size_t j = 0; j < K; ++j) {
        const double* s = c.dict->atom(j);
        double g = c.phij[j] + quad * c.n2j[j];
        for (int k = 0; k < d; ++k) g += lin[k] * s[k];
        g *= c.vol;
        G[j] = g;
        if (g < best) {
          best = g;
          jb = j;
        }
        if (w[j] > 0) {
          wg += w[j] * g;
          if (g > worst) {
            worst = g;
            jw = j;
          }
        }
        f += w[j] * c.phij[j] * c.vol;
      }
      if (reduced) f += c.vol * c.a[i] * mp.Lnu.at(i, d);
      for (int k = 0; k < d; ++k) f += c.vol * (-c.h->at(i, k) + 0.5 * hd.at(i, k)) * mp.m.at(i, k);
      const double gap_i = std::max(0.0, wg - best);
      gap += gap_i;
      jp[i] = jb;
      jm[i] = jw;
      wminus[i] = w[jw];

      // Candidate moment changes for a unit step.
      double dm_fw[2], dl_fw, dm_pw[2], dl_pw;
      const double* sb = c.dict->atom(jb);
      const double* sw = c.dict->atom(jw);
      for (int k = 0; k < d; ++k) {
        dm_fw[k] = sb[k] - mp.m.at(i, k);
        dm_pw[k] = w[jw] * (sb[k] - sw[k]);
      }
      dl_fw = c.n2j[jb] - mp.Lnu.at(i, d);
      dl_pw = w[jw] * (c.n2j[jb] - c.n2j[jw]);
      auto model = [&](const double* dm, double dl, double sl, double& g_out) {
        double m2 = 0;
        for (int k = 0; k < d; ++k) m2 += dm[k] * dm[k];
        const double cv = 0.5 * (cm * m2 + cp[i] * (m2 + dl * dl));
        g_out = cv > 0 ? std::min(1.0, -sl / (2.0 * cv)) : 1.0;
        return -sl * g_out - cv * g_out * g_out;
      };
      double g_fw = 0, g_pw = 0;
      const double sl_fw = -gap_i;
      const double sl_pw = -w[jw] * std::max(0.0, worst - best);
      const double dec_fw = gap_i > 0 ? model(dm_fw, dl_fw, sl_fw, g_fw) : 0.0;
      const double dec_pw = sl_pw < 0 ? model(dm_pw, dl_pw, sl_pw, g_pw) : 0.0;
      double* md = mD.cell(i);
      double* ld = LD.cell(i);
      if (dec_fw <= 0 && dec_pw <= 0) {
        gam[i] = 0;
        kind[i] = 0;
      } else if (dec_pw > dec_fw) {
        kind[i] = 1;
        gam[i] = g_pw;
        slope += g_pw * sl_pw;
      } else {
        kind[i] = 0;
        gam[i] = g_fw;
        slope += g_fw * sl_fw;
      }
      const double* dm = kind[i] ? dm_pw : dm_fw;
      for (int k = 0; k < d; ++k) md[k] = ld[k] = gam[i] * dm[k];
      ld[d] = gam[i] * (kind[i] ? dl_pw : dl_fw);
      gmax = std::max(gmax, gam[i]);
    }
    if (with_pen) {
      double pen = 0;
      for (std::size_t i = 0; i < N; ++i)
        for (int k = 0; k < n; ++k) pen += y.at(i, k) * (lambda->at(i, k) - mp.Lnu.at(i, k));
      f += -0.5 * c.kappa * c.vol * pen;
    }
    rep.iterations = it;
    rep.residual = gap;
    const double scale = std::max(std::abs(f + lambda_const), 1e-14);
    if (gap <= c.opt.tol_nu * scale) {
      rep.converged = true;
      break;
    }
    if (it >= c.opt.max_fw || gmax <= 0) break;

    const VectorField hdD = c.ops->h_dem(mD);
    double curv = 0.5 * l2_inner(mD, hdD);
    VectorField yD;
    if (with_pen) {
      yD = c.ops->poisson.solve(LD);
      curv += -0.5 * c.kappa * l2_inner(yD, LD);
    }
    const double tmax = 1.0 / gmax;
    const double t = curv > 0 ? std::clamp(-slope / (2.0 * curv), 0.0, tmax) : tmax;
    if (t <= 0.0) break;

    for (std::size_t i = 0; i < N; ++i) {
      if (gam[i] <= 0) continue;
      const double g = std::min(1.0, t * gam[i]);
      double* w = nu.w.data() + i * K;
      if (kind[i] == 0) {
        for (std::size_t j = 0; j < K; ++j) w[j] *= (1.0 - g);
        w[jp[i]] += g;
      } else {
        const double move = g * wminus[i];
        w[jp[i]] += move;
        w[jm[i]] = g >= 1.0 ? 0.0 : w[jm[i]] - move;
      }
    }
    for (std::size_t k = 0; k < mp.m.values.size(); ++k) {
      mp.m.values[k] += t * mD.values[k];
      hd.values[k] += t * hdD.values[k];
    }
    for (std::size_t k = 0; k < mp.Lnu.values.size(); ++k) {
      mp.Lnu.values[k] += t * LD.values[k];
      if (with_pen) y.values[k] -= t * yD.values[k];
    }
  }
  prune(nu);
  return rep;
}

// Proximal gradient on v = (lambda - lambda_prev)/tau.
StepReport prox_lambda(const Ctx& c, const VectorField& Lnu, VectorField& lambda) {
  const int n = c.d + 1;
  const std::size_t N = c.N;
  const double q = c.mat->q;
  StepReport rep;

  auto smooth = [&](const VectorField& lam, VectorField* grad) {
    const VectorField r = lam - Lnu;
    const VectorField y = c.ops->poisson.solve(r);
    double pen = 0, lin = 0, reg = 0;
    for (std::size_t i = 0; i < N; ++i) {
      double n2 = 0;
      for (int k = 0; k < n; ++k) {
        pen += y.at(i, k) * r.at(i, k);
        n2 += lam.at(i, k) * lam.at(i, k);
      }
      lin += c.a[i] * lam.at(i, c.d);
      if (c.reg > 0) reg += std::pow(n2, q);
      if (grad) {
        const double rc = c.reg > 0 ? c.tau * c.reg * 2.0 * q * std::pow(n2, q - 1.0) : 0.0;
        for (int k = 0; k < n; ++k) grad->at(i, k) = rc * lam.at(i, k) - c.kappa * y.at(i, k);
        grad->at(i, c.d) += c.a[i];
      }
    }
    return c.vol * (lin - 0.5 * c.kappa * pen + c.tau * c.reg * reg);
  };

  const VectorField& lp = *c.lambda_prev;
  VectorField v(c.grid, n), u(c.grid, n), grad(c.grid, n), lam_u(c.grid, n);
  for (std::size_t k = 0; k < v.values.size(); ++k) v.values[k] = (lambda.values[k] - lp.values[k]) / c.tau;
  double sigma = 1.0 / (c.tau * (c.kappa + 1.0));
  double S = smooth(lambda, &grad);

  for (int it = 0;; ++it) {
    rep.iterations = it;
    if (it >= c.opt.max_lambda) break;
    double Su = 0;
    for (int bt = 0; bt < 200; ++bt) {
      for (std::size_t i = 0; i < N; ++i) {
        double z[8];
        for (int k = 0; k < n; ++k) z[k] = v.at(i, k) - sigma * grad.at(i, k);
        prox_dissipation(z, n, sigma, *c.mat, u.cell(i));
      }
      for (std::size_t k = 0; k < u.values.size(); ++k) lam_u.values[k] = lp.values[k] + c.tau * u.values[k];
      Su = smooth(lam_u, nullptr);
      double lin = 0, quad = 0;
      for (std::size_t k = 0; k < u.values.size(); ++k) {
        const double dv = u.values[k] - v.values[k];
        lin += grad.values[k] * dv;
        quad += dv * dv;
      }
      const double model = S + c.tau * c.vol * (lin + quad / (2.0 * sigma));
      if (Su <= model + 1e-13 * std::max(1.0, std::abs(S))) break;
      sigma *= 0.5;
    }
    double change = 0, vmax = 0;
    for (std::size_t k = 0; k < u.values.size(); ++k) {
      change = std::max(change, std::abs(u.values[k] - v.values[k]));
      vmax = std::max(vmax, std::abs(u.values[k]));
    }
    std::swap(v, u);
    std::swap(lambda, lam_u);
    S = smooth(lambda, &grad);
    rep.residual = change;
    if (change <= c.opt.tol_lambda * (1.0 + vmax)) {
      rep.converged = true;
      rep.iterations = it + 1;
      break;
    }
    sigma *= 1.5;
  }
  require_finite(lambda.values, "lambda_step");
  return rep;
}

// Exact minimiser in lambda of the static problem: lambda - Lnu = Lap(a e_last)/kappa.
void static_lambda(const Ctx& c, const VectorField& Lnu, VectorField& lambda) {
  lambda = Lnu;
  const std::vector<double> La = c.ops->poisson.apply(c.a);
  for (std::size_t i = 0; i < c.N; ++i) lambda.at(i, c.d) += La[i] / c.kappa;
}

}  // namespace

ObjectiveParts increment_objective(const IncrementProblem& prob, const State& s) {
  ScalarField th;
  const Ctx c = make_ctx(prob, th);
  ObjectiveParts out;
  LambdaTerms lt;
  out.total = full_objective(c, s.nu, s.lambda, &out.gibbs, &lt);
  out.regularization = lt.reg;
  out.dissipation = lt.diss;
  return out;
}

StepReport nu_step(const IncrementProblem& prob, const VectorField& lambda_fixed, DictMeasure& nu) {
  ScalarField th;
  const Ctx c = make_ctx(prob, th);
  const LambdaTerms lt = lambda_terms(c, lambda_fixed);
  return fw_minimize(c, nu, &lambda_fixed, false, lt.coupling + lt.reg + lt.diss);
}

StepReport lambda_step(const IncrementProblem& prob, const DictMeasure& nu_fixed, VectorField& lambda) {
  ScalarField th;
  const Ctx c = make_ctx(prob, th);
  return prox_lambda(c, moments(nu_fixed).Lnu, lambda);
}

IncrementSolution incremental_solve(const IncrementProblem& prob) {
  ScalarField th;
  const Ctx c = make_ctx(prob, th);
  IncrementSolution sol;
  sol.state = prob.prev;
  double J = full_objective(c, sol.state.nu, sol.state.lambda, nullptr, nullptr);
  sol.trace.push_back(J);
  for (int s = 0; s < prob.opt.max_sweeps; ++s) {
    auto do_nu = [&]() {
      const LambdaTerms lt = lambda_terms(c, sol.state.lambda);
      sol.last_nu = fw_minimize(c, sol.state.nu, &sol.state.lambda, false, lt.coupling + lt.reg + lt.diss);
    };
    auto do_lambda = [&]() { sol.last_lambda = prox_lambda(c, moments(sol.state.nu).Lnu, sol.state.lambda); };
    if (prob.opt.nu_first) {
      do_nu();
      do_lambda();
    } else {
      do_lambda();
      do_nu();
    }
    const double Jn = full_objective(c, sol.state.nu, sol.state.lambda, nullptr, nullptr);
    sol.sweeps = s + 1;
    if (Jn > J + 1e-11 * std::max(1.0, std::abs(J)))
      throw SolverError("incremental_solve: objective increased during alternation");
    sol.trace.push_back(Jn);
    const double dec = J - Jn;
    J = Jn;
    if (dec <= prob.opt.tol_alt * std::max(std::abs(Jn), 1e-14)) {
      sol.converged = true;
      break;
    }
  }
  sol.objective = J;
  if (prob.opt.flow_audit) {
    const FlowRuleReport fr = flowrule_residual(prob, sol.state, default_directions(prob, sol.state, prob.opt.audit_seed));
    sol.flow_residual = fr.worst;
    sol.flow_scale = fr.scale;
  }
  return sol;
}

StaticSolution static_solve(const Material& mat_in, const VectorField& h, const ScalarField& theta, double kappa,
                            const Operators& ops, const Dictionary& dict, const IncrementOptions& opt) {
  if (!(kappa > 0)) throw ConfigError("static_solve: kappa must be > 0");
  Material mat = mat_in;
  mat.kappa_pen = kappa;
  const Ctx c = make_ctx(mat, ops, dict, h, theta, kappa, opt);
  StaticSolution sol;
  sol.nu = dict_from_nearest(dict, VectorField(ops.grid, ops.grid.dim));
  sol.lambda = moments(sol.nu).Lnu;
  static_lambda(c, sol.lambda, sol.lambda);
  double J = full_objective(c, sol.nu, sol.lambda, nullptr, nullptr);
  sol.trace.push_back(J);
  for (int s = 0; s < opt.max_sweeps; ++s) {
    // First sweep minimises the measure with lambda eliminated exactly; later
    // sweeps are plain alternations and only confirm stationarity.
    if (s == 0)
      fw_minimize(c, sol.nu, nullptr, true, 0.0);
    else
      fw_minimize(c, sol.nu, &sol.lambda, false, lambda_terms(c, sol.lambda).coupling);
    static_lambda(c, moments(sol.nu).Lnu, sol.lambda);
    const double Jn = full_objective(c, sol.nu, sol.lambda, &sol.parts, nullptr);
    sol.sweeps = s + 1;
    if (Jn > J + 1e-11 * std::max(1.0, std::abs(J)))
      throw SolverError("static_solve: objective increased during alternation");
    sol.trace.push_back(Jn);
    const double dec = J - Jn;
    J = Jn;
    if (s > 0 && dec <= opt.tol_alt * std::max(std::abs(Jn), 1e-14)) {
      sol.converged = true;
      break;
    }
  }
  sol.objective = J;
  if (ops.ms) sol.magnetostatics = ops.ms->solve(moments(sol.nu).m);
  return sol;
}

}  // namespace magmeso
