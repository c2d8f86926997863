#include "magmeso/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace magmeso {

Grid Grid::make_1d(int n, double length) {
  Grid g;
  g.dim = 1;
  g.extents = {n, 1};
  g.spacing = {length / n, 1.0};
  g.origin = {0.5 * length / n, 0.0};
  g.validate();
  return g;
}

Grid Grid::make_2d(int nx, int ny, double lx, double ly) {
  Grid g;
  g.dim = 2;
  g.extents = {nx, ny};
  g.spacing = {lx / nx, ly / ny};
  g.origin = {0.5 * lx / nx, 0.5 * ly / ny};
  g.validate();
  return g;
}

std::size_t Grid::cells() const {
  return dim == 1 ? static_cast<std::size_t>(extents[0])
                  : static_cast<std::size_t>(extents[0]) * static_cast<std::size_t>(extents[1]);
}

double Grid::cell_volume() const { return dim == 1 ? spacing[0] : spacing[0] * spacing[1]; }

std::array<double, 2> Grid::center(std::size_t cell) const {
  const int i = static_cast<int>(cell % extents[0]);
  const int j = static_cast<int>(cell / extents[0]);
  return {origin[0] + i * spacing[0], dim == 2 ? origin[1] + j * spacing[1] : 0.0};
}

void Grid::validate() const {
  if (dim != 1 && dim != 2) throw ConfigError("grid: dim must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    if (extents[a] < 2) throw ConfigError("grid: every extent must be >= 2");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) throw ConfigError("grid: spacing must be > 0");
  }
}

ScalarField::ScalarField(const Grid& g, double fill) : grid(g), values(g.cells(), fill) {}

ScalarField::ScalarField(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.cells()) throw ConfigError("scalar field: value count does not match grid");
}

VectorField::VectorField(const Grid& g, int k, double fill) : grid(g), comps(k), values(g.cells() * k, fill) {}

VectorField::VectorField(const Grid& g, int k, std::vector<double> v) : grid(g), comps(k), values(std::move(v)) {
  if (values.size() != grid.cells() * static_cast<std::size_t>(k))
    throw ConfigError("vector field: value count does not match grid");
}

ScalarField VectorField::component(int c) const {
  ScalarField f(grid);
  for (std::size_t i = 0; i < cells(); ++i) f[i] = at(i, c);
  return f;
}

void VectorField::set_component(int c, const ScalarField& f) {
  require_same_grid(grid, f.grid, "set_component");
  for (std::size_t i = 0; i < cells(); ++i) at(i, c) = f[i];
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw ConfigError(std::string(what) + ": fields live on different grids");
}

void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw SolverError(std::string(what) + ": non-finite value");
}

namespace {
template <class F, class Op>
F combine(const F& a, const F& b, Op op, const char* what) {
  require_same_grid(a.grid, b.grid, what);
  if (a.values.size() != b.values.size()) throw ConfigError(std::string(what) + ": component mismatch");
  F r = a;
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] = op(a.values[i], b.values[i]);
  require_finite(r.values, what);
  return r;
}
}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](double x, double y) { return x + y; }, "scalar +");
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](double x, double y) { return x - y; }, "scalar -");
}
ScalarField operator*(double s, const ScalarField& a) {
  ScalarField r = a;
  for (double& x : r.values) x *= s;
  require_finite(r.values, "scalar *");
  return r;
}
VectorField operator+(const VectorField& a, const VectorField& b) {
  return combine(a, b, [](double x, double y) { return x + y; }, "vector +");
}
VectorField operator-(const VectorField& a, const VectorField& b) {
  return combine(a, b, [](double x, double y) { return x - y; }, "vector -");
}
VectorField operator*(double s, const VectorField& a) {
  VectorField r = a;
  for (double& x : r.values) x *= s;
  require_finite(r.values, "vector *");
  return r;
}

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double x : f.values) s += x;
  return s * f.grid.cell_volume();
}

double l2_inner(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid, "l2_inner");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s * a.grid.cell_volume();
}

VectorField broadcast(const Grid& g, const std::vector<double>& v) {
  VectorField f(g, static_cast<int>(v.size()));
  for (std::size_t i = 0; i < g.cells(); ++i)
    for (std::size_t c = 0; c < v.size(); ++c) f.at(i, static_cast<int>(c)) = v[c];
  return f;
}

double Material::r_max() const { return 2.0 * std::sqrt(a0 * theta_c / (2.0 * b0)); }

std::vector<Violation> validate_material(const Material& m) {
  std::vector<Violation> out;
  auto need = [&](bool ok, const char* field, const char* msg) {
    if (!ok) out.push_back({field, msg});
  };
  need(m.a0 > 0, "a0", "a0>0 required");
  need(m.b0 > 0, "b0", "b0>0 required");
  need(m.theta_c > 0, "theta_c", "theta_c>0 required");
  need(m.beta_aniso >= 0, "beta_aniso", "beta_aniso>=0 required");
  need(m.b_p >= 0, "b_p", "b_p>=0 required");
  if (m.b_p > 0) need(m.p > 4, "p", "p>4 required");
  need(m.eps_visc > 0, "eps_visc", "eps_visc>0 required");
  need(m.q >= 2, "q", "q>=2 required");
  if (m.q > 1) need(m.cv_omega >= m.q_conjugate() - 1e-14, "cv_omega", "omega>=q/(q-1) required");
  if (m.shape == ActivationShape::Ball) {
    need(m.rho >= 0, "rho_S", "rho>=0 required");
  } else {
    need(!m.rho_box.empty(), "rho_S", "box half-widths required");
    for (double r : m.rho_box) need(r >= 0, "rho_S", "box half-widths must be >=0");
  }
  need(m.kappa_pen > 0, "kappa_pen", "kappa>0 required");
  need(m.mu0 > 0, "mu0", "mu0>0 required");
  need(m.cv_c0 > 0, "cv_c0", "cv_c0>0 required");
  need(m.kappa0 > 0, "K_params", "kappa0>0 required");
  need(m.C_K >= m.kappa0, "K_params", "kappa0<=C_K required");
  need(m.pad_factor >= 1, "pad_factor", "pad_factor>=1 required");
  for (const auto& s : m.easy_axes) {
    double n2 = 0;
    for (double x : s) n2 += x * x;
    need(std::abs(n2 - 1.0) <= 1e-12, "easy_axes", "easy axes must have unit length");
  }
  if (m.A_proj) {
    const Eigen::MatrixXd& A = *m.A_proj;
    if (A.rows() != A.cols() || A.rows() < 2) {
      out.push_back({"A_proj", "A_proj must be square of size d+1"});
    } else {
      need((A * A - A).cwiseAbs().maxCoeff() <= 1e-12, "A_proj", "A_proj must satisfy A^2=A");
      need((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12, "A_proj",
           "A_proj must be symmetric (orthogonal projector)");
      // Ker A within Ker(a_flat.): a_flat = (0,...,0,a0) must vanish on every kernel vector.
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      Eigen::MatrixXd ker = lu.kernel();
      if (lu.rank() < A.rows()) {
        const Eigen::Index last = A.rows() - 1;
        need((m.a0 * ker.row(last)).cwiseAbs().maxCoeff() <= 1e-12, "A_proj", "Ker A must lie in Ker(a_flat)");
      }
      need(m.rho_S1 >= 0 && m.rho_S2 >= 0, "rho_S", "split radii must be >=0");
    }
  }
  return out;
}

std::vector<Violation> validate_material(const Material& m, int d) {
  std::vector<Violation> out = validate_material(m);
  for (const auto& s : m.easy_axes)
    if (static_cast<int>(s.size()) != d) out.push_back({"easy_axes", "easy axis dimension must equal d"});
  if (m.shape == ActivationShape::Box && static_cast<int>(m.rho_box.size()) != d + 1)
    out.push_back({"rho_S", "box needs d+1 half-widths"});
  if (m.A_proj && m.A_proj->rows() != d + 1) out.push_back({"A_proj", "A_proj must be (d+1)x(d+1)"});
  return out;
}

int Schedule::steps() const { return static_cast<int>(std::llround(T_end / tau)); }

void Schedule::validate(int d) const {
  if (!(T_end > 0) || !(tau > 0)) throw ConfigError("schedule: T_end and tau must be > 0");
  if (std::abs(steps() * tau - T_end) > 1e-9 * T_end) throw ConfigError("schedule: T_end must be a multiple of tau");
  if (h.empty()) throw ConfigError("schedule: at least one h keyframe required");
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (static_cast<int>(h[i].value.size()) != d) throw ConfigError("schedule: h keyframe dimension must equal d");
    if (i > 0 && !(h[i].t > h[i - 1].t)) throw ConfigError("schedule: keyframe times must be strictly increasing");
  }
  for (std::size_t i = 0; i < theta_ext.size(); ++i) {
    if (theta_ext[i].value < 0) throw ConfigError("schedule: theta_ext must be >= 0");
    if (i > 0 && !(theta_ext[i].t > theta_ext[i - 1].t))
      throw ConfigError("schedule: theta_ext keyframe times must be strictly increasing");
  }
  if (b < 0) throw ConfigError("schedule: b must be >= 0");
}

namespace {
// Index of the segment [k_i, k_{i+1}) containing t, or -1 before the first
// keyframe, or size-1 at/after the last.
template <class K>
int segment(const std::vector<K>& kf, double t) {
  if (t < kf.front().t) return -1;
  auto it = std::upper_bound(kf.begin(), kf.end(), t, [](double x, const K& k) { return x < k.t; });
  return static_cast<int>(it - kf.begin()) - 1;
}

void check_time(const Schedule& s, double t) {
  if (!(t >= 0.0) || t > s.T_end * (1 + 1e-12) + 1e-15) {
    std::ostringstream os;
    os << "sample_schedule: t=" << t << " outside [0," << s.T_end << "]";
    throw ConfigError(os.str());
  }
}
}  // namespace

std::vector<double> schedule_h(const Schedule& s, double t) {
  check_time(s, t);
  const int k = segment(s.h, t);
  if (k < 0) return s.h.front().value;
  if (k + 1 >= static_cast<int>(s.h.size())) return s.h.back().value;
  const auto& a = s.h[k];
  const auto& b = s.h[k + 1];
  const double f = (t - a.t) / (b.t - a.t);
  std::vector<double> v(a.value.size());
  for (std::size_t c = 0; c < v.size(); ++c) v[c] = a.value[c] + f * (b.value[c] - a.value[c]);
  return v;
}

std::vector<double> schedule_hdot(const Schedule& s, double t) {
  check_time(s, t);
  const int k = segment(s.h, t);
  std::vector<double> v(s.h.front().value.size(), 0.0);
  if (k < 0 || k + 1 >= static_cast<int>(s.h.size())) return v;
  const auto& a = s.h[k];
  const auto& b = s.h[k + 1];
  for (std::size_t c = 0; c < v.size(); ++c) v[c] = (b.value[c] - a.value[c]) / (b.t - a.t);
  return v;
}

double schedule_theta_ext(const Schedule& s, double t) {
  check_time(s, t);
  if (s.theta_ext.empty()) return 0.0;
  const int k = segment(s.theta_ext, t);
  if (k < 0) return s.theta_ext.front().value;
  if (k + 1 >= static_cast<int>(s.theta_ext.size())) return s.theta_ext.back().value;
  const auto& a = s.theta_ext[k];
  const auto& b = s.theta_ext[k + 1];
  return a.value + (t - a.t) / (b.t - a.t) * (b.value - a.value);
}

ScheduleSample sample_schedule(const Schedule& s, const Grid& g, double t) {
  ScheduleSample out;
  out.h = broadcast(g, schedule_h(s, t));
  out.hdot = broadcast(g, schedule_hdot(s, t));
  out.theta_ext = schedule_theta_ext(s, t);
  out.b = s.b;
  return out;
}

}  // namespace magmeso
