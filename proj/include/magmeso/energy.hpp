#pragma once

#include <vector>

#include "magmeso/core.hpp"
#include "magmeso/elliptic.hpp"
#include "magmeso/measure.hpp"

namespace magmeso {

// Anisotropy density: beta(|m|^2 - max_a (m.s_a)^2) + b0|m|^4 + b_p|m|^p.
double phi(const double* m, int d, const Material& mat);
double phi(const std::vector<double>& m, const Material& mat);

// Support function of the activation set S.
double support_S(const double* v, int n, const Material& mat);
double support_S(const std::vector<double>& v, const Material& mat);

// Rate-independent part used by the evolution: support_S, or the split
// delta*_{S2}(A v) + delta*_{S1}(v - A v) when a projector is configured.
double rate_support(const double* v, int n, const Material& mat);
// |v|, or |A v| with a projector: the part that carries the viscous term.
double viscous_norm(const double* v, int n, const Material& mat);

// xi(v) = rate_support(v) + eps |v|^q  (heat production rate).
double dissipation_rate(const double* v, int n, const Material& mat);
double dissipation_rate(const std::vector<double>& v, const Material& mat);
// zeta(v) = rate_support(v) + (eps/q) |v|^q  (dissipation potential).
double dissipation_potential(const double* v, int n, const Material& mat);
double dissipation_potential(const std::vector<double>& v, const Material& mat);

// argmin_v zeta(v) + |v - z|^2 / (2 sigma).
void prox_dissipation(const double* z, int n, double sigma, const Material& mat, double* out);
std::vector<double> prox_dissipation(const std::vector<double>& z, double sigma, const Material& mat);

double heat_capacity(double theta, const Material& mat);
double enthalpy_of_theta(double theta, const Material& mat);
double theta_of_enthalpy(double w, const Material& mat);
// Effective conductivity in the enthalpy variable, clamped to [kappa0, C_K].
double conductivity(const double* lambda, int n, double w, const Material& mat);

struct GibbsEvaluation {
  double total = 0.0;
  double anisotropy = 0.0;
  double coupling = 0.0;
  double magnetostatic = 0.0;
  double zeeman = 0.0;
  double penalty = 0.0;
  // Gibbs energy without the temperature coupling.
  double magnetic() const { return anisotropy + magnetostatic + zeeman + penalty; }
};

GibbsEvaluation gibbs(double t, const AtomicYoungMeasure& nu, const VectorField& lambda, const ScalarField& theta,
                      const Schedule& schedule, const Operators& ops, const Material& mat);
// Same evaluation with the field h given directly.
GibbsEvaluation gibbs_with_field(const AtomicYoungMeasure& nu, const VectorField& lambda, const ScalarField& theta,
                                 const VectorField& h, const Operators& ops, const Material& mat);
GibbsEvaluation gibbs_with_field(const DictMeasure& nu, const VectorField& lambda, const ScalarField& theta,
                                 const VectorField& h, const Operators& ops, const Material& mat);

// L2 gradient density of the penalty in lambda: -kappa Lap^{-1}(lambda - Lnu).
VectorField penalty_gradient(const VectorField& lambda, const VectorField& Lnu, const Operators& ops, double kappa);
// L2 gradient density of the Gibbs energy in lambda.
VectorField gibbs_lambda_gradient(const VectorField& lambda, const VectorField& Lnu, const ScalarField& theta,
                                  const Operators& ops, const Material& mat);

}  // namespace magmeso
