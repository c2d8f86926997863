#include "magmeso/elliptic.hpp"

#include <cmath>
#include <sstream>
#include <variant>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace magmeso {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

struct SpdSolver::Impl {
  std::variant<Eigen::SimplicialLDLT<SpMat>,
               Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>>>
      s;
};

SpdSolver::SpdSolver(const SpMat& A, const EllipticOptions& opt) : A_(A), impl_(std::make_unique<Impl>()) {
  if (static_cast<std::size_t>(A.rows()) < opt.direct_limit) {
    auto& ldlt = impl_->s.emplace<0>();
    ldlt.compute(A_);
    if (ldlt.info() != Eigen::Success) throw SolverError("sparse LDL^T factorisation failed");
  } else {
    auto& cg = impl_->s.emplace<1>();
    cg.setTolerance(opt.cg_tol);
    cg.setMaxIterations(opt.cg_max_iter);
    cg.compute(A_);
  }
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

bool SpdSolver::direct() const { return impl_->s.index() == 0; }

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b, double tol) const {
  const double bn = b.norm();
  if (bn == 0.0) return Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd x = std::visit([&](auto& s) -> Eigen::VectorXd { return s.solve(b); }, impl_->s);
  const double res = (A_ * x - b).norm() / bn;
  if (!(res <= tol)) {
    std::ostringstream os;
    os << "linear solve did not converge: relative residual " << res;
    throw SolverError(os.str());
  }
  return x;
}

namespace {

SpMat dirichlet_matrix(const Grid& g) {
  // Assembles -Lap (SPD). Boundary faces use the ghost value -u, adding 2/h^2.
  const std::size_t n = g.cells();
  std::vector<Trip> t;
  t.reserve(n * 5);
  const int nx = g.extents[0];
  const int ny = g.dim == 2 ? g.extents[1] : 1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int row = i + nx * j;
      double diag = 0.0;
      auto axis = [&](int pos, int len, int stride, double h) {
        const double c = 1.0 / (h * h);
        if (pos > 0) {
          t.emplace_back(row, row - stride, -c);
          diag += c;
        } else {
          diag += 2.0 * c;
        }
        if (pos < len - 1) {
          t.emplace_back(row, row + stride, -c);
          diag += c;
        } else {
          diag += 2.0 * c;
        }
      };
      axis(i, nx, 1, g.spacing[0]);
      if (g.dim == 2) axis(j, ny, nx, g.spacing[1]);
      t.emplace_back(row, row, diag);
    }
  SpMat A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

}  // namespace

DirichletPoisson::DirichletPoisson(const Grid& g, const EllipticOptions& opt)
    : grid_(g), neg_lap_(dirichlet_matrix(g)), solver_(neg_lap_, opt) {}

std::vector<double> DirichletPoisson::solve(const std::vector<double>& f) const {
  if (f.size() != grid_.cells()) throw ConfigError("solve_dirichlet: size mismatch");
  Eigen::Map<const Eigen::VectorXd> fm(f.data(), static_cast<Eigen::Index>(f.size()));
  Eigen::VectorXd u = -solver_.solve(fm, 1e-10);
  std::vector<double> out(u.data(), u.data() + u.size());
  require_finite(out, "solve_dirichlet");
  return out;
}

ScalarField DirichletPoisson::solve(const ScalarField& f) const {
  require_same_grid(grid_, f.grid, "solve_dirichlet");
  return ScalarField(grid_, solve(f.values));
}

VectorField DirichletPoisson::solve(const VectorField& f) const {
  require_same_grid(grid_, f.grid, "solve_dirichlet");
  VectorField u(grid_, f.comps);
  std::vector<double> comp(grid_.cells());
  for (int c = 0; c < f.comps; ++c) {
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = f.at(i, c);
    const std::vector<double> uc = solve(comp);
    for (std::size_t i = 0; i < comp.size(); ++i) u.at(i, c) = uc[i];
  }
  return u;
}

const std::vector<double>& DirichletPoisson::inverse_diagonal() const {
  if (inv_diag_.empty()) {
    const Eigen::Index n = neg_lap_.rows();
    inv_diag_.resize(n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      e[i] = 1.0;
      inv_diag_[i] = solver_.solve(e, 1e-10)[i];
      e[i] = 0.0;
    }
  }
  return inv_diag_;
}

std::vector<double> DirichletPoisson::apply(const std::vector<double>& u) const {
  Eigen::Map<const Eigen::VectorXd> um(u.data(), static_cast<Eigen::Index>(u.size()));
  Eigen::VectorXd r = -(neg_lap_ * um);
  return std::vector<double>(r.data(), r.data() + r.size());
}

VectorField DirichletPoisson::apply(const VectorField& u) const {
  VectorField out(grid_, u.comps);
  std::vector<double> comp(grid_.cells());
  for (int c = 0; c < u.comps; ++c) {
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = u.at(i, c);
    const std::vector<double> r = apply(comp);
    for (std::size_t i = 0; i < comp.size(); ++i) out.at(i, c) = r[i];
  }
  return out;
}

double hminus_inner(const DirichletPoisson& P, const VectorField& f, const VectorField& g) {
  require_same_grid(f.grid, g.grid, "hminus_inner");
  require_same_grid(P.grid(), f.grid, "hminus_inner");
  const VectorField u = P.solve(f);
  return -l2_inner(u, g);
}

double hminus_norm(const DirichletPoisson& P, const VectorField& f) {
  return std::sqrt(std::max(0.0, hminus_inner(P, f, f)));
}

MagnetostaticSolver::MagnetostaticSolver(const Grid& omega, double mu0, double pad_factor,
                                         const EllipticOptions& opt)
    : omega_(omega), mu0_(mu0) {
  if (!(mu0 > 0)) throw ConfigError("magnetostatics: mu0 must be > 0");
  if (!(pad_factor >= 1)) throw ConfigError("magnetostatics: pad_factor must be >= 1");
  for (int a = 0; a < omega.dim; ++a) {
    const int n = omega.extents[a];
    pad_[a] = static_cast<int>(std::ceil((pad_factor - 1.0) * n / 2.0 - 1e-9));
    ncell_[a] = n + 2 * pad_[a];
    nnode_[a] = ncell_[a] + 1;
  }
  const int nx = nnode_[0];
  const int ny = omega.dim == 2 ? nnode_[1] : 1;
  map_.assign(static_cast<std::size_t>(nx) * ny, -1);
  std::vector<Trip> t;
  if (omega.dim == 1) {
    // Node 0 fixed, node ncell free (natural zero-flux end).
    for (int i = 1; i < nx; ++i) map_[i] = nunk_++;
    const double k = mu0 / omega.spacing[0];
    for (int e = 0; e < ncell_[0]; ++e) {
      const int a = map_[e], b = map_[e + 1];
      if (a >= 0) t.emplace_back(a, a, k);
      if (b >= 0) t.emplace_back(b, b, k);
      if (a >= 0 && b >= 0) {
        t.emplace_back(a, b, -k);
        t.emplace_back(b, a, -k);
      }
    }
  } else {
    for (int j = 1; j < ny - 1; ++j)
      for (int i = 1; i < nx - 1; ++i) map_[i + nx * j] = nunk_++;
    const double hx = omega.spacing[0], hy = omega.spacing[1];
    const double Sx[2][2] = {{1 / hx, -1 / hx}, {-1 / hx, 1 / hx}};
    const double Sy[2][2] = {{1 / hy, -1 / hy}, {-1 / hy, 1 / hy}};
    const double Mx[2][2] = {{hx / 3, hx / 6}, {hx / 6, hx / 3}};
    const double My[2][2] = {{hy / 3, hy / 6}, {hy / 6, hy / 3}};
    for (int cj = 0; cj < ncell_[1]; ++cj)
      for (int ci = 0; ci < ncell_[0]; ++ci)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const int r = map_[(ci + a) + nx * (cj + b)];
            if (r < 0) continue;
            for (int a2 = 0; a2 < 2; ++a2)
              for (int b2 = 0; b2 < 2; ++b2) {
                const int c = map_[(ci + a2) + nx * (cj + b2)];
                if (c < 0) continue;
                t.emplace_back(r, c, mu0 * (Sx[a][a2] * My[b][b2] + Mx[a][a2] * Sy[b][b2]));
              }
          }
  }
  SpMat K(nunk_, nunk_);
  K.setFromTriplets(t.begin(), t.end());
  solver_ = std::make_unique<SpdSolver>(K, opt);
}

Eigen::VectorXd MagnetostaticSolver::rhs(const VectorField& m) const {
  require_same_grid(omega_, m.grid, "solve_magnetostatic");
  if (m.comps != omega_.dim) throw ConfigError("solve_magnetostatic: m must have d components");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nunk_);
  auto add = [&](int node, double v) {
    const int k = map_[node];
    if (k >= 0) b[k] += v;
  };
  if (omega_.dim == 1) {
    for (int e = 0; e < omega_.extents[0]; ++e) {
      const int pe = pad_[0] + e;
      add(pe, -m.at(e, 0));
      add(pe + 1, m.at(e, 0));
    }
  } else {
    const int nx = nnode_[0];
    const double vol = omega_.cell_volume();
    const double cx = vol / (2 * omega_.spacing[0]), cy = vol / (2 * omega_.spacing[1]);
    for (int j = 0; j < omega_.extents[1]; ++j)
      for (int i = 0; i < omega_.extents[0]; ++i) {
        const std::size_t cell = omega_.index(i, j);
        const double mx = m.at(cell, 0), my = m.at(cell, 1);
        const int n00 = (pad_[0] + i) + nx * (pad_[1] + j);
        add(n00, -cx * mx - cy * my);
        add(n00 + 1, cx * mx - cy * my);
        add(n00 + nx, -cx * mx + cy * my);
        add(n00 + nx + 1, cx * mx + cy * my);
      }
  }
  return b;
}

std::vector<double> MagnetostaticSolver::expand(const Eigen::VectorXd& x) const {
  std::vector<double> u(map_.size(), 0.0);
  for (std::size_t k = 0; k < map_.size(); ++k)
    if (map_[k] >= 0) u[k] = x[map_[k]];
  return u;
}

VectorField MagnetostaticSolver::gradient(const std::vector<double>& u) const {
  VectorField g(omega_, omega_.dim);
  if (omega_.dim == 1) {
    for (int e = 0; e < omega_.extents[0]; ++e) {
      const int pe = pad_[0] + e;
      g.at(e, 0) = (u[pe + 1] - u[pe]) / omega_.spacing[0];
    }
  } else {
    const int nx = nnode_[0];
    for (int j = 0; j < omega_.extents[1]; ++j)
      for (int i = 0; i < omega_.extents[0]; ++i) {
        const int n00 = (pad_[0] + i) + nx * (pad_[1] + j);
        const double u00 = u[n00], u10 = u[n00 + 1], u01 = u[n00 + nx], u11 = u[n00 + nx + 1];
        const std::size_t cell = omega_.index(i, j);
        g.at(cell, 0) = ((u10 + u11) - (u00 + u01)) / (2 * omega_.spacing[0]);
        g.at(cell, 1) = ((u01 + u11) - (u00 + u10)) / (2 * omega_.spacing[1]);
      }
  }
  return g;
}

MagnetostaticResult MagnetostaticSolver::solve(const VectorField& m) const {
  MagnetostaticResult r;
  r.node_extents = {nnode_[0], omega_.dim == 2 ? nnode_[1] : 1};
  const Eigen::VectorXd x = solver_->solve(rhs(m), 1e-8);
  r.u = expand(x);
  r.h_dem = gradient(r.u);
  r.energy = 0.5 * l2_inner(m, r.h_dem);
  require_finite(r.h_dem.values, "solve_magnetostatic");
  return r;
}

VectorField MagnetostaticSolver::field(const VectorField& m) const {
  return gradient(expand(solver_->solve(rhs(m), 1e-8)));
}

double MagnetostaticSolver::energy(const VectorField& m) const { return 0.5 * l2_inner(m, field(m)); }

Operators::Operators(const Grid& g, double mu0, double pad_factor, bool magnetostatics, const EllipticOptions& opt)
    : grid(g), poisson(g, opt) {
  if (magnetostatics) ms = std::make_shared<MagnetostaticSolver>(g, mu0, pad_factor, opt);
}

VectorField Operators::h_dem(const VectorField& m) const {
  if (!ms) return VectorField(m.grid, m.comps);
  return ms->field(m);
}

}  // namespace magmeso
