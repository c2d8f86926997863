#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "magmeso/audit.hpp"
#include "magmeso/config.hpp"
#include "magmeso/heat.hpp"

namespace magmeso {

// Tolerances a run must meet to pass its audit.
struct AuditTolerances {
  double energy = 1e-6;   // relative to the balance scale
  double flow = 1e-7;     // relative to the flow-rule scale
  double semistability = 1e-6;
  double jensen = 1e-12;
  double simplex = 1e-12;
  double nonneg = 1e-12;
  double heat_residual = 1e-8;
};

struct AuditVerdict {
  bool pass = true;
  double energy_worst = 0.0;         // min relative slack
  double flow_worst = 0.0;           // min residual / scale
  double semistability_worst = 0.0;  // min margin / scale
  double jensen_min = 0.0;
  double simplex_max = 0.0;
  double min_w = 0.0;
  double heat_residual_max = 0.0;
  std::vector<std::string> failures;
};

struct EvolveResult {
  Trajectory traj;
  EnergyBalanceReport balance;
  std::vector<MonitorRow> monitors;
  AuditVerdict verdict;
  State final_state;
};

using StepCallback = std::function<void(const StepRecord&, const State&)>;

// Static minimising measure at t = 0 and theta0, with lambda set to its moment vector.
State initial_state(const Config& cfg, const Operators& ops, const Dictionary& dict);

// Time loop: incremental_solve with the previous enthalpy, then heat_step.
EvolveResult evolve(const Config& cfg, const StepCallback& on_step = {});
AuditVerdict judge(const Trajectory& traj, const EnergyBalanceReport& eb, const AuditTolerances& tol = {});

struct KappaRow {
  double kappa = 0.0;
  double gap = 0.0;    // ||lambda - Lnu||_{H^-1}
  double kgap2 = 0.0;  // kappa * gap^2
  double objective = 0.0;
  double magnetic = 0.0;
  int sweeps = 0;
};

// Static solves at h(0), theta0 along cfg.run.kappa_ladder (default 8 values, x4 apart from kappa).
std::vector<KappaRow> kappa_sweep(const Config& cfg);

struct TauStudy {
  std::vector<double> taus;
  // Distances between levels i and i+1 (size levels-1).
  std::vector<double> dist_lambda;  // max over checkpoints of L2 distance
  std::vector<double> dist_w;       // max over checkpoints of L1 distance
  std::vector<double> dist_m;       // sup over coarse step times of |<m>_0| difference
  // Final monitor values per level.
  std::vector<MonitorRow> monitors;
  std::vector<AuditVerdict> verdicts;
};

TauStudy tau_study(const Config& cfg);

struct HysteresisResult {
  EvolveResult run;
  double area = 0.0;              // |loop integral of <m>_0 dh_0| over the last period
  double pathlength = 0.0;        // int |Delta lambda| summed over the last period
  double ri_direct = 0.0;         // tau int rate_support(rate) over the last period
  double ri_from_balance = 0.0;   // work - Delta G - viscous - exchange - reg over the last period
};

HysteresisResult hysteresis(const Config& cfg);

struct CurieRow {
  double theta = 0.0;
  double mean_m0 = 0.0;
  double mean_second = 0.0;  // cell average of the |m|^2 moment
  double objective = 0.0;
};

std::vector<CurieRow> curie_sweep(const Config& cfg);

// "# field=<name> dim=.. extents=.. components=.. time=..", a "# cell,..." column line, then one row per cell.
void write_field_snapshot(std::ostream& os, const std::string& name, const VectorField& f, double time);
void write_field_snapshot(std::ostream& os, const std::string& name, const ScalarField& f, double time);

// File-writing drivers used by the command line tool. Return the process
// exit status: 0 pass, 1 audit failure.
int run_evolve(const Config& cfg, const std::string& outdir);
int run_static(const Config& cfg, const std::string& outdir);
int run_kappa_sweep(const Config& cfg, const std::string& outdir);
int run_tau_study(const Config& cfg, const std::string& outdir);
int run_hysteresis(const Config& cfg, const std::string& outdir);
int run_curie_sweep(const Config& cfg, const std::string& outdir);

}  // namespace magmeso
