#pragma once

#include <vector>

#include "magmeso/core.hpp"
#include "magmeso/elliptic.hpp"
#include "magmeso/energy.hpp"
#include "magmeso/measure.hpp"

namespace magmeso {

struct IncrementOptions {
  double reg_weight = 1.0;  // weight of tau |lambda|^{2q}
  double tol_nu = 1e-8;     // Frank-Wolfe gap relative to |objective|
  int max_fw = 2000;
  double tol_lambda = 1e-9;
  int max_lambda = 500;
  double tol_alt = 1e-10;
  int max_sweeps = 100;
  bool nu_first = true;
  bool flow_audit = true;   // evaluate the flow-rule residual at the solution
  unsigned audit_seed = 0;
};

struct State {
  DictMeasure nu;
  VectorField lambda;
};

// One step of the time-incremental problem at t_k = k tau with the enthalpy
// of the previous level frozen.
struct IncrementProblem {
  int k = 1;
  double tau = 0.01;
  State prev;
  ScalarField w_prev;
  VectorField h;  // external field at t_k
  const Material* mat = nullptr;
  const Operators* ops = nullptr;
  IncrementOptions opt;

  ScalarField theta() const;
};

struct ObjectiveParts {
  GibbsEvaluation gibbs;        // at the frozen temperature
  double regularization = 0.0;  // tau * w_reg * int |lambda|^{2q}
  double dissipation = 0.0;     // tau * int zeta((lambda - lambda_prev)/tau)
  double total = 0.0;
};

ObjectiveParts increment_objective(const IncrementProblem& prob, const State& s);

struct StepReport {
  int iterations = 0;
  double residual = 0.0;  // FW gap for the measure step, fixed-point change for lambda
  bool converged = false;
};

// Minimises over per-cell simplex weights with lambda fixed.
StepReport nu_step(const IncrementProblem& prob, const VectorField& lambda_fixed, DictMeasure& nu);
// Proximal gradient in the rate variable with nu fixed.
StepReport lambda_step(const IncrementProblem& prob, const DictMeasure& nu_fixed, VectorField& lambda);

struct IncrementSolution {
  State state;
  double objective = 0.0;
  std::vector<double> trace;  // objective after every sweep, first entry at the warm start
  int sweeps = 0;
  bool converged = false;
  StepReport last_nu, last_lambda;
  double flow_residual = 0.0;
  double flow_scale = 1.0;
};

IncrementSolution incremental_solve(const IncrementProblem& prob);

struct StaticSolution {
  DictMeasure nu;
  VectorField lambda;
  MagnetostaticResult magnetostatics;
  double objective = 0.0;
  GibbsEvaluation parts;
  std::vector<double> trace;
  int sweeps = 0;
  bool converged = false;
};

// Penalised static problem (no dissipation, no regularisation) at given h, theta.
StaticSolution static_solve(const Material& mat, const VectorField& h, const ScalarField& theta, double kappa,
                            const Operators& ops, const Dictionary& dict, const IncrementOptions& opt = {});

}  // namespace magmeso
