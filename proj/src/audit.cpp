#include "magmeso/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace magmeso {

namespace {

double norm(const double* v, int n) {
  double s = 0;
  for (int k = 0; k < n; ++k) s += v[k] * v[k];
  return std::sqrt(s);
}

// Smooth-part gradient density of the increment objective in lambda.
VectorField smooth_gradient(const IncrementProblem& prob, const State& s) {
  const Material& mat = *prob.mat;
  const ScalarField theta = prob.theta();
  VectorField g = gibbs_lambda_gradient(s.lambda, moments(s.nu).Lnu, theta, *prob.ops, mat);
  const double w = prob.opt.reg_weight;
  if (w > 0) {
    const int n = s.lambda.comps;
    for (std::size_t i = 0; i < g.cells(); ++i) {
      const double* l = s.lambda.cell(i);
      double n2 = 0;
      for (int k = 0; k < n; ++k) n2 += l[k] * l[k];
      const double c = prob.tau * w * 2.0 * mat.q * std::pow(n2, mat.q - 1.0);
      for (int k = 0; k < n; ++k) g.at(i, k) += c * l[k];
    }
  }
  return g;
}

// Cost of moving lambda by delta in the part not controlled by the projector.
double complement_cost(const double* delta, int n, const Material& mat) {
  if (!mat.A_proj) return support_S(delta, n, mat);
  const Eigen::MatrixXd& A = *mat.A_proj;
  double pv[8];
  for (int r = 0; r < n; ++r) {
    double s = 0;
    for (int c = 0; c < n; ++c) s += A(r, c) * delta[c];
    pv[r] = delta[r] - s;
  }
  return mat.rho_S1 * norm(pv, n);
}

VectorField apply_projector(const Material& mat, const VectorField& f, bool complement) {
  VectorField out = f;
  if (!mat.A_proj) {
    if (!complement) std::fill(out.values.begin(), out.values.end(), 0.0);
    return out;
  }
  const Eigen::MatrixXd& A = *mat.A_proj;
  const int n = f.comps;
  for (std::size_t i = 0; i < f.cells(); ++i)
    for (int r = 0; r < n; ++r) {
      double s = 0;
      for (int c = 0; c < n; ++c) s += A(r, c) * f.at(i, c);
      out.at(i, r) = complement ? f.at(i, r) - s : s;
    }
  return out;
}

double regularization(const IncrementProblem& prob, const VectorField& lambda) {
  const double w = prob.opt.reg_weight;
  if (!(w > 0)) return 0.0;
  double s = 0;
  const int n = lambda.comps;
  for (std::size_t i = 0; i < lambda.cells(); ++i) {
    double n2 = 0;
    for (int k = 0; k < n; ++k) n2 += lambda.at(i, k) * lambda.at(i, k);
    s += std::pow(n2, prob.mat->q);
  }
  return prob.tau * w * s * lambda.grid.cell_volume();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

VectorField lambda_rate(const IncrementProblem& prob, const State& s) {
  return (1.0 / prob.tau) * (s.lambda - prob.prev.lambda);
}

std::vector<VectorField> default_directions(const IncrementProblem& prob, const State& s, unsigned seed,
                                            int random_count) {
  const VectorField rate = lambda_rate(prob, s);
  double rmax = 0;
  for (double v : rate.values) rmax = std::max(rmax, std::abs(v));
  const double R = 1.0 + 2.0 * rmax;
  Rng rng(seed);
  std::vector<VectorField> dirs;
  for (int j = 0; j < random_count; ++j) {
    VectorField v(rate.grid, rate.comps);
    // Alternate between global draws and small perturbations of the rate.
    const bool local = j % 2 == 1;
    const double amp = local ? 0.05 * R : R;
    for (std::size_t k = 0; k < v.values.size(); ++k)
      v.values[k] = (local ? rate.values[k] : 0.0) + rng.uniform(-amp, amp);
    dirs.push_back(std::move(v));
  }
  dirs.push_back(VectorField(rate.grid, rate.comps));
  dirs.push_back(rate);
  dirs.push_back(2.0 * rate);
  dirs.push_back(0.5 * rate);
  dirs.push_back(-1.0 * rate);
  return dirs;
}

FlowRuleReport flowrule_residual(const IncrementProblem& prob, const State& s, const std::vector<VectorField>& dirs) {
  if (dirs.empty()) throw ConfigError("flowrule_residual: no test directions");
  const Material& mat = *prob.mat;
  const VectorField rate = lambda_rate(prob, s);
  const VectorField g = smooth_gradient(prob, s);
  const int n = rate.comps;
  const double vol = rate.grid.cell_volume();
  std::vector<double> zr(rate.cells());
  for (std::size_t i = 0; i < rate.cells(); ++i) zr[i] = dissipation_potential(rate.cell(i), n, mat);

  FlowRuleReport rep;
  rep.worst = std::numeric_limits<double>::infinity();
  double scale_max = 0;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    const VectorField& v = dirs[d];
    require_same_grid(v.grid, rate.grid, "flowrule_residual");
    double res = 0, scale = 0;
    for (std::size_t i = 0; i < rate.cells(); ++i) {
      double lin = 0;
      for (int k = 0; k < n; ++k) lin += g.at(i, k) * (v.at(i, k) - rate.at(i, k));
      const double zv = dissipation_potential(v.cell(i), n, mat);
      res += lin + (zv - zr[i]);
      scale += std::abs(lin) + zv + zr[i];
    }
    res *= vol;
    scale *= vol;
    rep.residuals.push_back(res);
    scale_max = std::max(scale_max, scale);
    if (res < rep.worst) {
      rep.worst = res;
      rep.worst_index = d;
    }
  }
  rep.scale = std::max(scale_max, 1e-14);
  return rep;
}

double gradient_exponent(int d) { return (d + 2.0) / (d + 1.0) - 0.1; }

double gradient_lr(const ScalarField& w, double r) {
  const Grid& g = w.grid;
  const double vol = g.cell_volume();
  const int nx = g.extents[0];
  const int ny = g.dim == 2 ? g.extents[1] : 1;
  double s = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (i + 1 < nx) s += std::pow(std::abs(w[g.index(i + 1, j)] - w[g.index(i, j)]) / g.spacing[0], r);
      if (g.dim == 2 && j + 1 < ny) s += std::pow(std::abs(w[g.index(i, j + 1)] - w[g.index(i, j)]) / g.spacing[1], r);
    }
  return s * vol;
}

EnergyBalanceReport energy_balance_report(const Trajectory& traj) {
  EnergyBalanceReport rep;
  if (traj.steps.empty()) return rep;
  const double G0 = traj.steps[0].gibbs_magnetic;
  double slack = 0, dissipated = 0, abs_in = std::abs(G0), abs_out = 0;
  for (std::size_t k = 1; k < traj.steps.size(); ++k) {
    const StepRecord& r = traj.steps[k];
    const StepRecord& p = traj.steps[k - 1];
    const double out = r.dissipation + r.exchange + r.reg_change;
    EnergyBalanceRow row;
    row.k = r.k;
    row.t = r.t;
    row.step_slack = (p.gibbs_magnetic + r.work) - (r.gibbs_magnetic + out);
    slack += row.step_slack;
    dissipated += out;
    abs_in += std::abs(r.work);
    abs_out += std::abs(r.dissipation) + std::abs(r.exchange) + std::abs(r.reg_change);
    row.slack = slack;
    row.dissipated = dissipated;
    row.scale = std::max(1.0, abs_in + abs_out + std::abs(r.gibbs_magnetic));
    rep.worst_relative = std::min(rep.worst_relative, row.slack / row.scale);
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<MonitorRow> apriori_monitors(const Trajectory& traj) {
  std::vector<MonitorRow> rows;
  const double r = gradient_exponent(traj.grid.dim);
  double pth = 0, lq = 0, l1 = 0, gr = 0;
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    const StepRecord& s = traj.steps[k];
    pth = std::max(pth, s.pth_moment);
    double wl1 = 0;
    for (double v : s.w.values) wl1 += std::abs(v);
    l1 = std::max(l1, wl1 * traj.grid.cell_volume());
    if (k > 0) {
      lq += traj.tau * s.rate_lq;
      gr += traj.tau * s.grad_w_lr;
    }
    MonitorRow row;
    row.k = s.k;
    row.t = s.t;
    row.pth_sup = pth;
    row.rate_lq = std::pow(lq, 1.0 / traj.q);
    row.w_l1_sup = l1;
    row.grad_w_lr = std::pow(gr, 1.0 / r);
    row.penalty = s.penalty;
    rows.push_back(row);
  }
  return rows;
}

SemistabilityReport semistability_residual(const IncrementProblem& prob, const State& s,
                                           const std::vector<SemistabilityPair>& pairs) {
  const Material& mat = *prob.mat;
  const ScalarField theta = prob.theta();
  const int n = s.lambda.comps;
  const double vol = s.lambda.grid.cell_volume();
  const double lhs = gibbs_with_field(s.nu, s.lambda, theta, prob.h, *prob.ops, mat).total + regularization(prob, s.lambda);
  const VectorField Al = apply_projector(mat, s.lambda, false);
  const VectorField Pl = apply_projector(mat, s.lambda, true);
  SemistabilityReport rep;
  rep.worst = std::numeric_limits<double>::infinity();
  rep.scale = std::max(1.0, std::abs(lhs));
  for (const auto& pr : pairs) {
    const VectorField lam = Al + pr.lambda_tilde;
    double cost = 0;
    for (std::size_t i = 0; i < lam.cells(); ++i) {
      double delta[8];
      for (int k = 0; k < n; ++k) delta[k] = pr.lambda_tilde.at(i, k) - Pl.at(i, k);
      cost += complement_cost(delta, n, mat);
    }
    const double rhs =
        gibbs_with_field(pr.nu, lam, theta, prob.h, *prob.ops, mat).total + regularization(prob, lam) + vol * cost;
    const double margin = rhs - lhs;
    rep.margins.push_back(margin);
    rep.worst = std::min(rep.worst, margin);
  }
  if (pairs.empty()) rep.worst = 0.0;
  return rep;
}

std::vector<SemistabilityPair> default_semistability_pairs(const IncrementProblem& prob, const State& s,
                                                           unsigned seed, int count) {
  const Material& mat = *prob.mat;
  const VectorField Pl = apply_projector(mat, s.lambda, true);
  const VectorField Al = apply_projector(mat, s.lambda, false);
  Rng rng(seed);
  std::vector<SemistabilityPair> pairs;
  pairs.push_back({s.nu, Pl});
  const double amps[3] = {0.1, 1.0, 10.0};
  const double rho = mat.A_proj ? mat.rho_S1 : mat.rho;
  for (int j = 0; j < count; ++j) {
    VectorField off(Pl.grid, Pl.comps);
    const double amp = amps[j % 3] * std::max(rho, 1e-3);
    for (double& v : off.values) v = rng.uniform(-amp, amp);
    const VectorField lt = Pl + apply_projector(mat, off, true);
    DictMeasure nu = s.nu;
    switch (j % 3) {
      case 0:
        break;
      case 1: {
        // Move part of the weight of a few cells onto a random atom.
        const std::size_t K = nu.K();
        for (std::size_t c = 0; c < nu.cells(); ++c) {
          if (rng.uniform() > 0.3) continue;
          const std::size_t a = rng.index(K);
          for (std::size_t k = 0; k < K; ++k) nu(c, k) *= 0.7;
          nu(c, a) += 0.3;
        }
        break;
      }
      default: {
        nu_step(prob, Al + lt, nu);
        break;
      }
    }
    pairs.push_back({std::move(nu), lt});
  }
  return pairs;
}

double variation_measure(const std::vector<VectorField>& lambdas, const Material& mat, std::size_t k0,
                         std::size_t k1) {
  if (k1 >= lambdas.size() || k0 > k1) throw ConfigError("variation_measure: bad interval");
  double total = 0;
  for (std::size_t k = k0 + 1; k <= k1; ++k) {
    const VectorField& a = lambdas[k];
    const VectorField& b = lambdas[k - 1];
    require_same_grid(a.grid, b.grid, "variation_measure");
    const int n = a.comps;
    double s = 0;
    for (std::size_t i = 0; i < a.cells(); ++i) {
      double delta[8];
      for (int c = 0; c < n; ++c) delta[c] = a.at(i, c) - b.at(i, c);
      s += complement_cost(delta, n, mat);
    }
    total += s * a.grid.cell_volume();
  }
  return total;
}

void write_series_csv(std::ostream& os, const Trajectory& traj) {
  const int d = traj.grid.dim;
  os << "k,t,h_0";
  for (int c = 0; c < d; ++c) os << ",mean_m_" << c;
  os << ",mean_theta,gibbs_total,gibbs_magnetic,anisotropy,coupling,magnetostatic,zeeman,penalty,"
        "dissipation,rate_independent,heat_content,boundary_flux,sweeps\n";
  for (const auto& s : traj.steps) {
    os << s.k << ',' << fmt(s.t) << ',' << fmt(s.mean_h0);
    for (int c = 0; c < d; ++c) os << ',' << fmt(c < static_cast<int>(s.mean_m.size()) ? s.mean_m[c] : 0.0);
    for (double v : {s.mean_theta, s.gibbs_total, s.gibbs_magnetic, s.anisotropy, s.coupling, s.magnetostatic,
                     s.zeeman, s.penalty, s.dissipation, s.rate_independent, s.heat_content, s.boundary_flux})
      os << ',' << fmt(v);
    os << ',' << s.sweeps << '\n';
  }
}

void write_audit_csv(std::ostream& os, const Trajectory& traj, const EnergyBalanceReport& eb) {
  os << "k,t,step_slack,energy_slack,dissipated,balance_scale,flow_residual,flow_scale,semistability,"
        "semistability_scale,jensen_min,simplex_defect,min_w,heat_bookkeeping,heat_weak_residual\n";
  for (std::size_t k = 1; k < traj.steps.size(); ++k) {
    const StepRecord& s = traj.steps[k];
    const EnergyBalanceRow& e = eb.rows.at(k - 1);
    os << s.k << ',' << fmt(s.t);
    for (double v : {e.step_slack, e.slack, e.dissipated, e.scale, s.flow_residual, s.flow_scale, s.semistability,
                     s.semistability_scale, s.jensen_min, s.simplex_defect, s.min_w, s.heat_bookkeeping,
                     s.heat_weak_residual})
      os << ',' << fmt(v);
    os << '\n';
  }
}

void write_monitors_csv(std::ostream& os, const std::vector<MonitorRow>& rows) {
  os << "k,t,pth_sup,rate_lq,w_l1_sup,grad_w_lr,penalty\n";
  for (const auto& r : rows)
    os << r.k << ',' << fmt(r.t) << ',' << fmt(r.pth_sup) << ',' << fmt(r.rate_lq) << ',' << fmt(r.w_l1_sup) << ','
       << fmt(r.grad_w_lr) << ',' << fmt(r.penalty) << '\n';
}

}  // namespace magmeso
