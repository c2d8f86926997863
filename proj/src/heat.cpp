#include "magmeso/heat.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>

#include "magmeso/elliptic.hpp"
#include "magmeso/energy.hpp"

namespace magmeso {

ScalarField dissipation_source(const VectorField& lambda_new, const VectorField& lambda_prev, double tau,
                               const Material& mat) {
  require_same_grid(lambda_new.grid, lambda_prev.grid, "dissipation_source");
  if (lambda_new.comps != lambda_prev.comps) throw ConfigError("dissipation_source: component mismatch");
  const int n = lambda_new.comps;
  ScalarField xi(lambda_new.grid);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    for (int k = 0; k < n; ++k) v[k] = (lambda_new.at(i, k) - lambda_prev.at(i, k)) / tau;
    xi[i] = dissipation_rate(v.data(), n, mat);
  }
  return xi;
}

namespace {

struct Face {
  std::size_t a, b;
  double weight;  // |face| / distance, without the conductivity
};

struct BoundaryFace {
  std::size_t cell;
  double area;
};

void build_faces(const Grid& g, std::vector<Face>& faces, std::vector<BoundaryFace>& bfaces) {
  const double vol = g.cell_volume();
  const int ny = g.dim == 2 ? g.extents[1] : 1;
  for (int ax = 0; ax < g.dim; ++ax) {
    const double h = g.spacing[ax];
    const double area = vol / h;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < g.extents[0]; ++i) {
        const int ii = ax == 0 ? i : j;
        const int n_ax = g.extents[ax];
        const std::size_t c = g.index(i, j);
        if (ii + 1 < n_ax) {
          const std::size_t nb = ax == 0 ? g.index(i + 1, j) : g.index(i, j + 1);
          faces.push_back({c, nb, area / h});
        }
        if (ii == 0 || ii == n_ax - 1) bfaces.push_back({c, area});
        if (n_ax == 1) bfaces.push_back({c, area});
      }
  }
}

void assert_m_matrix(const Eigen::SparseMatrix<double>& A) {
  for (int col = 0; col < A.outerSize(); ++col) {
    double diag = 0, off = 0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
      if (it.row() == it.col()) {
        diag = it.value();
      } else {
        if (it.value() > 0) throw SolverError("heat_step: positive off-diagonal entry");
        off -= it.value();
      }
    }
    if (!(diag > 0) || diag < off * (1.0 - 1e-14))
      throw SolverError("heat_step: matrix is not diagonally dominant");
  }
}

}  // namespace

HeatStepResult heat_step(const HeatStepProblem& prob) {
  if (!prob.mat) throw ConfigError("heat_step: material required");
  if (!(prob.tau > 0)) throw ConfigError("heat_step: tau must be > 0");
  if (prob.b < 0) throw ConfigError("heat_step: b must be >= 0");
  const Material& mat = *prob.mat;
  const Grid& g = prob.w_prev.grid;
  require_same_grid(prob.lambda_new.grid, g, "heat_step");
  require_same_grid(prob.lambda_prev.grid, g, "heat_step");
  require_finite(prob.w_prev.values, "heat_step w_prev");
  const std::size_t N = g.cells();
  const int n = prob.lambda_new.comps;
  const double vol = g.cell_volume();
  const double tau = prob.tau;

  std::vector<Face> faces;
  std::vector<BoundaryFace> bfaces;
  build_faces(g, faces, bfaces);

  const ScalarField xi = dissipation_source(prob.lambda_new, prob.lambda_prev, tau, mat);
  std::vector<double> c(N);  // a_flat . rate
  for (std::size_t i = 0; i < N; ++i)
    c[i] = mat.a0 * (prob.lambda_new.at(i, n - 1) - prob.lambda_prev.at(i, n - 1)) / tau;
  const double s0 = 1.0 / heat_capacity(0.0, mat);

  auto face_conductivity = [&](const std::vector<double>& w, std::vector<double>& K) {
    K.resize(N);
    for (std::size_t i = 0; i < N; ++i) K[i] = conductivity(prob.lambda_new.cell(i), n, w[i], mat);
  };

  HeatStepResult res;
  std::vector<double> w = prob.w_prev.values, K;
  Eigen::VectorXd rhs(N);
  for (int it = 1; it <= prob.max_iter; ++it) {
    face_conductivity(w, K);
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> diag(N, vol / tau);
    for (std::size_t i = 0; i < N; ++i) {
      const double th = theta_of_enthalpy(w[i], mat);
      const double s = w[i] > 0 ? th / w[i] : s0;
      rhs[i] = vol / tau * prob.w_prev[i] + vol * xi[i];
      if (c[i] >= 0)
        rhs[i] += vol * c[i] * th;
      else
        diag[i] += -vol * c[i] * s;
    }
    for (const auto& bf : bfaces) {
      const double th = theta_of_enthalpy(w[bf.cell], mat);
      const double s = w[bf.cell] > 0 ? th / w[bf.cell] : s0;
      diag[bf.cell] += prob.b * bf.area * s;
      rhs[bf.cell] += prob.b * bf.area * prob.theta_ext;
    }
    for (const auto& f : faces) {
      const double coef = 0.5 * (K[f.a] + K[f.b]) * f.weight;
      diag[f.a] += coef;
      diag[f.b] += coef;
      trip.emplace_back(f.a, f.b, -coef);
      trip.emplace_back(f.b, f.a, -coef);
    }
    for (std::size_t i = 0; i < N; ++i) trip.emplace_back(i, i, diag[i]);
    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(trip.begin(), trip.end());
    assert_m_matrix(A);
    const SpdSolver solver(A, EllipticOptions{});
    const Eigen::VectorXd x = solver.solve(rhs, 1e-11);
    double dn = 0, wn = 0;
    for (std::size_t i = 0; i < N; ++i) {
      dn += (x[i] - w[i]) * (x[i] - w[i]);
      wn += x[i] * x[i];
      w[i] = x[i];
    }
    res.iterations = it;
    res.change = std::sqrt(dn) / std::max(std::sqrt(wn), 1e-300);
    if (res.change <= prob.tol) {
      res.converged = true;
      break;
    }
  }
  require_finite(w, "heat_step");

  // Diagnostics of the nonlinear system at the returned w.
  face_conductivity(w, K);
  std::vector<double> R(N);
  double dw = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double th = theta_of_enthalpy(w[i], mat);
    R[i] = vol * ((w[i] - prob.w_prev[i]) / tau - xi[i] - c[i] * th);
    res.source += vol * xi[i];
    res.coupling += vol * c[i] * th;
    dw += vol * (w[i] - prob.w_prev[i]);
  }
  for (const auto& bf : bfaces) {
    const double flux = prob.b * bf.area * (prob.theta_ext - theta_of_enthalpy(w[bf.cell], mat));
    res.boundary_flux += flux;
    R[bf.cell] -= flux;
  }
  for (const auto& f : faces) {
    const double q = 0.5 * (K[f.a] + K[f.b]) * f.weight * (w[f.b] - w[f.a]);
    R[f.a] -= q;
    R[f.b] += q;
  }
  for (double r : R) res.weak_residual = std::max(res.weak_residual, std::abs(r) * tau / vol);
  res.bookkeeping = dw - tau * (res.source + res.coupling + res.boundary_flux);
  res.w = ScalarField(g, std::move(w));
  return res;
}

NonnegativityReport check_nonnegativity(const ScalarField& w, double tol) {
  NonnegativityReport r;
  r.min = w.size() ? w[0] : 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    r.min = std::min(r.min, w[i]);
    if (w[i] < -tol) r.violations.push_back(i);
  }
  return r;
}

}  // namespace magmeso
