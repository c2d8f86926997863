#pragma once

#include <iosfwd>
#include <vector>

#include "magmeso/increment.hpp"

namespace magmeso {

// ---- flow rule -------------------------------------------------------------

struct FlowRuleReport {
  double worst = 0.0;            // min over directions of LHS - RHS
  double scale = 1.0;            // magnitude of the terms entering the worst comparison
  std::size_t worst_index = 0;
  std::vector<double> residuals;
};

// Rate of the accepted step, (lambda - lambda_prev)/tau.
VectorField lambda_rate(const IncrementProblem& prob, const State& s);

// 64 seeded random rate fields, then 0, the rate itself, and 2x, 0.5x, -1x the rate.
std::vector<VectorField> default_directions(const IncrementProblem& prob, const State& s, unsigned seed,
                                            int random_count = 64);

// Discrete flow-rule inequality tested at each direction v:
// sum vol [ F'(lambda).(v - rate) + zeta(v) - zeta(rate) ] >= 0 where F is the
// smooth part of the increment objective in lambda.
FlowRuleReport flowrule_residual(const IncrementProblem& prob, const State& s, const std::vector<VectorField>& dirs);

// ---- trajectories ----------------------------------------------------------

struct StepRecord {
  int k = 0;
  double t = 0.0;
  double gibbs_magnetic = 0.0;  // Gibbs energy without the temperature coupling at (t_k, nu^k, lambda^k)
  double gibbs_total = 0.0;     // with the temperature that entered the increment
  double anisotropy = 0.0, coupling = 0.0, magnetostatic = 0.0, zeeman = 0.0, penalty = 0.0;
  double work = 0.0;            // -int (h(t_k) - h(t_{k-1})) . m^{k-1}
  double dissipation = 0.0;     // tau int xi(rate)
  double rate_independent = 0.0;  // tau int rate_support(rate)
  double exchange = 0.0;        // int (theta^{k-1} - theta_c) a0 (lambda^k - lambda^{k-1})_last
  double reg_change = 0.0;      // tau w_reg int (|lambda^k|^{2q} - |lambda^{k-1}|^{2q})
  double heat_content = 0.0;    // int w
  double boundary_flux = 0.0;   // tau * boundary heat inflow
  double heat_bookkeeping = 0.0;
  double heat_weak_residual = 0.0;
  double flow_residual = 0.0, flow_scale = 1.0;
  double semistability = 0.0, semistability_scale = 1.0;
  bool has_semistability = false;
  double pth_moment = 0.0;      // int |.|^p . nu
  double rate_lq = 0.0;         // int |rate|^q
  double grad_w_lr = 0.0;       // int |grad w|^r
  double jensen_min = 0.0;
  double simplex_defect = 0.0;
  double min_w = 0.0;
  int sweeps = 0;
  std::vector<double> mean_m;
  double mean_theta = 0.0;
  double mean_h0 = 0.0;         // first component of h(t_k)
  VectorField lambda;
  ScalarField w;
};

struct Trajectory {
  Grid grid;
  double tau = 0.0;
  double p = 6.0, q = 2.0;
  std::vector<StepRecord> steps;  // steps[0] is the initial state
};

// Exponent of the gradient monitor: (d+2)/(d+1) - 0.1.
double gradient_exponent(int d);
// int |grad w|^r over interior faces (difference quotients, each weighted by vol).
double gradient_lr(const ScalarField& w, double r);

struct EnergyBalanceRow {
  int k = 0;
  double t = 0.0;
  double step_slack = 0.0;
  double slack = 0.0;       // cumulative
  double dissipated = 0.0;  // cumulative dissipation + exchange + regularisation change
  double scale = 1.0;
};

struct EnergyBalanceReport {
  std::vector<EnergyBalanceRow> rows;
  double worst_relative = 0.0;  // min over k of slack / scale
};

// Discrete energy inequality:
// G(t_k) + sum(dissipation + exchange + reg change) <= G(0) + sum(work).
EnergyBalanceReport energy_balance_report(const Trajectory& traj);

struct MonitorRow {
  int k = 0;
  double t = 0.0;
  double pth_sup = 0.0;      // running sup of int |.|^p . nu
  double rate_lq = 0.0;      // (sum tau int |rate|^q)^(1/q)
  double w_l1_sup = 0.0;     // running sup of int |w|
  double grad_w_lr = 0.0;    // (sum tau int |grad w|^r)^(1/r)
  double penalty = 0.0;
};

std::vector<MonitorRow> apriori_monitors(const Trajectory& traj);

// ---- variant with projector ------------------------------------------------

struct SemistabilityPair {
  DictMeasure nu;
  VectorField lambda_tilde;  // must satisfy A lambda_tilde = 0
};

struct SemistabilityReport {
  double worst = 0.0;  // min over pairs of RHS - LHS
  double scale = 1.0;
  std::vector<double> margins;
};

// Competitors (nu~, A lambda + lambda~) against the accepted state with the
// temperature of the increment:
//   G(nu, lambda) + R(lambda) <= G(nu~, A lambda + lambda~) + R(A lambda + lambda~)
//                               + int rho_S1 |lambda~ - (I-A) lambda|
// where R is the tau |lambda|^{2q} regularisation.
SemistabilityReport semistability_residual(const IncrementProblem& prob, const State& s,
                                           const std::vector<SemistabilityPair>& pairs);

// The current state, measure perturbations, the measure optimal for a
// perturbed lambda, and lambda~ = (I-A)lambda + rho-scaled random offsets.
std::vector<SemistabilityPair> default_semistability_pairs(const IncrementProblem& prob, const State& s,
                                                           unsigned seed, int count = 16);

// sum_k int rho_S1 |(I-A)(lambda^k - lambda^{k-1})| for k in (k0, k1].
// Without a projector the full activation support is used.
double variation_measure(const std::vector<VectorField>& lambdas, const Material& mat, std::size_t k0,
                         std::size_t k1);

// ---- tables ----------------------------------------------------------------

void write_series_csv(std::ostream& os, const Trajectory& traj);
void write_audit_csv(std::ostream& os, const Trajectory& traj, const EnergyBalanceReport& eb);
void write_monitors_csv(std::ostream& os, const std::vector<MonitorRow>& rows);

}  // namespace magmeso
