#pragma once

#include <vector>

#include "magmeso/core.hpp"

namespace magmeso {

struct HeatStepProblem {
  double tau = 0.01;
  ScalarField w_prev;
  VectorField lambda_new;
  VectorField lambda_prev;
  const Material* mat = nullptr;
  double b = 0.0;          // heat-transfer coefficient on every boundary face
  double theta_ext = 0.0;
  double tol = 1e-10;      // relative L2 change between fixed-point iterates
  int max_iter = 200;
};

struct HeatStepResult {
  ScalarField w;
  int iterations = 0;
  double change = 0.0;
  bool converged = false;
  // Integrals over Omega (times vol) at the returned w.
  double source = 0.0;         // int xi(rate)
  double coupling = 0.0;       // int I(w) a_flat . rate
  double boundary_flux = 0.0;  // sum over boundary faces of b (theta_ext - I(w)) |face|
  // Sum (w - w_prev) vol - tau (source + coupling + boundary_flux).
  double bookkeeping = 0.0;
  // Largest cell residual of the nonlinear system, scaled by vol/tau.
  double weak_residual = 0.0;
};

// Per-cell xi((lambda_new - lambda_prev)/tau).
ScalarField dissipation_source(const VectorField& lambda_new, const VectorField& lambda_prev, double tau,
                               const Material& mat);

// One implicit enthalpy step. Each fixed-point iterate solves a symmetric
// M-matrix system with nonnegative right-hand side, so w stays >= 0.
HeatStepResult heat_step(const HeatStepProblem& prob);

struct NonnegativityReport {
  double min = 0.0;
  std::vector<std::size_t> violations;  // cells below -1e-12
};

NonnegativityReport check_nonnegativity(const ScalarField& w, double tol = 1e-12);

}  // namespace magmeso
