#pragma once

#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "magmeso/core.hpp"

namespace magmeso {

struct EllipticOptions {
  std::size_t direct_limit = 100000;  // direct factorisation below this many unknowns
  double cg_tol = 1e-12;
  int cg_max_iter = 200000;
};

// SPD sparse solve: LDL^T below the size limit, Jacobi-preconditioned CG above.
class SpdSolver {
 public:
  SpdSolver(const Eigen::SparseMatrix<double>& A, const EllipticOptions& opt);
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;
  // Solves A x = b; throws SolverError if the relative residual exceeds `tol`.
  Eigen::VectorXd solve(const Eigen::VectorXd& b, double tol) const;
  bool direct() const;
  const Eigen::SparseMatrix<double>& matrix() const { return A_; }

 private:
  struct Impl;
  Eigen::SparseMatrix<double> A_;
  std::unique_ptr<Impl> impl_;
};

// Cell-centred 3-point (1D) / 5-point (2D) Laplacian with u = 0 on the
// boundary faces (ghost-cell reflection). Sign convention: solve returns u
// with  Lap u = f.
class DirichletPoisson {
 public:
  explicit DirichletPoisson(const Grid& g, const EllipticOptions& opt = {});

  std::vector<double> solve(const std::vector<double>& f) const;
  ScalarField solve(const ScalarField& f) const;
  VectorField solve(const VectorField& f) const;  // componentwise
  std::vector<double> apply(const std::vector<double>& u) const;
  VectorField apply(const VectorField& u) const;
  const Grid& grid() const { return grid_; }
  bool direct() const { return solver_.direct(); }
  // Diagonal of (-Lap)^{-1}, computed on first use.
  const std::vector<double>& inverse_diagonal() const;

 private:
  Grid grid_;
  mutable std::vector<double> inv_diag_;
  Eigen::SparseMatrix<double> neg_lap_;
  SpdSolver solver_;
};

// <<f,g>> = int grad Lap^{-1} f . grad Lap^{-1} g, evaluated as -<Lap^{-1} f, g>.
double hminus_inner(const DirichletPoisson& P, const VectorField& f, const VectorField& g);
double hminus_norm(const DirichletPoisson& P, const VectorField& f);

struct MagnetostaticResult {
  std::array<int, 2> node_extents{};  // padded node counts per axis
  std::vector<double> u;              // potential at every padded node
  VectorField h_dem;                  // grad u averaged over each cell of Omega
  double energy = 0.0;                // 1/2 int_Omega m . h_dem
};

// Weak solve of div(mu0 grad u - chi m) = 0 on Omega embedded in a box
// `pad_factor` times larger per axis. The potential is bilinear on the padded
// cells (nodal unknowns), m is cellwise constant. In 2D u = 0 on the outer
// boundary. In 1D u = 0 at the left end and the right end carries zero flux,
// which reproduces the decaying-field limit exactly.
class MagnetostaticSolver {
 public:
  MagnetostaticSolver(const Grid& omega, double mu0, double pad_factor, const EllipticOptions& opt = {});

  MagnetostaticResult solve(const VectorField& m) const;
  // h_dem only.
  VectorField field(const VectorField& m) const;
  double energy(const VectorField& m) const;
  int pad_cells(int axis) const { return pad_[axis]; }
  std::size_t unknowns() const { return static_cast<std::size_t>(nunk_); }
  bool direct() const { return solver_->direct(); }

 private:
  Eigen::VectorXd rhs(const VectorField& m) const;
  std::vector<double> expand(const Eigen::VectorXd& x) const;
  VectorField gradient(const std::vector<double>& u) const;

  Grid omega_;
  double mu0_;
  std::array<int, 2> pad_{0, 0};
  std::array<int, 2> ncell_{0, 0};  // padded cell counts
  std::array<int, 2> nnode_{0, 0};
  std::vector<int> map_;            // node -> unknown index or -1
  Eigen::Index nunk_ = 0;
  std::unique_ptr<SpdSolver> solver_;
};

// Elliptic operators shared by the energy, increment and audit modules.
struct Operators {
  Grid grid;
  DirichletPoisson poisson;
  std::shared_ptr<MagnetostaticSolver> ms;  // null when magnetostatics is disabled

  Operators(const Grid& g, double mu0, double pad_factor, bool magnetostatics, const EllipticOptions& opt = {});
  VectorField h_dem(const VectorField& m) const;
};

}  // namespace magmeso
