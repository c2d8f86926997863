#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace magmeso {

// Thrown for malformed input (bad grids, mismatched fields, invalid schedules).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an iterative or direct solver cannot meet its tolerance.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Seeded generator whose uniform draw does not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

 private:
  std::mt19937_64 eng_;
};

// Uniform cell-centred grid in one or two dimensions.
struct Grid {
  int dim = 1;
  std::array<int, 2> extents{2, 1};
  std::array<double, 2> spacing{0.5, 1.0};
  std::array<double, 2> origin{0.25, 0.0};  // centre of the first cell

  // Grid covering [0,length_x] (x [0,length_y]) with n cells per axis.
  static Grid make_1d(int n, double length = 1.0);
  static Grid make_2d(int nx, int ny, double lx = 1.0, double ly = 1.0);

  std::size_t cells() const;
  double cell_volume() const;
  double length(int axis) const { return spacing[axis] * extents[axis]; }
  std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(i + extents[0] * j); }
  std::array<double, 2> center(std::size_t cell) const;
  void validate() const;

  bool operator==(const Grid& o) const = default;
};

struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(const Grid& g, double fill = 0.0);
  ScalarField(const Grid& g, std::vector<double> v);

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

// One length-`comps` vector per cell, stored cell-major.
struct VectorField {
  Grid grid;
  int comps = 1;
  std::vector<double> values;

  VectorField() = default;
  VectorField(const Grid& g, int k, double fill = 0.0);
  VectorField(const Grid& g, int k, std::vector<double> v);

  double& at(std::size_t cell, int c) { return values[cell * comps + c]; }
  double at(std::size_t cell, int c) const { return values[cell * comps + c]; }
  const double* cell(std::size_t i) const { return values.data() + i * comps; }
  double* cell(std::size_t i) { return values.data() + i * comps; }
  std::size_t cells() const { return grid.cells(); }
  ScalarField component(int c) const;
  void set_component(int c, const ScalarField& f);
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);
void require_finite(const std::vector<double>& v, const char* what);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& a);

// Volume-weighted integral of a scalar field.
double integrate(const ScalarField& f);
// Volume-weighted L2 inner product over all components.
double l2_inner(const VectorField& a, const VectorField& b);
VectorField broadcast(const Grid& g, const std::vector<double>& v);

enum class ActivationShape { Ball, Box };
enum class ConductivityModel { Constant, Clamped };

struct Material {
  double a0 = 2.0;
  double b0 = 1.0;
  double theta_c = 1.0;
  double beta_aniso = 0.0;
  std::vector<std::vector<double>> easy_axes{{1.0}};
  double p = 6.0;
  double b_p = 1e-3;
  double eps_visc = 0.1;
  double q = 2.0;
  ActivationShape shape = ActivationShape::Ball;
  double rho = 0.1;                 // ball radius
  std::vector<double> rho_box;      // box half-widths, length d+1
  double kappa_pen = 1.0;
  double mu0 = 1.0;
  double cv_c0 = 1.0;
  double cv_omega = 2.0;
  double kappa0 = 1.0;
  double C_K = 1.0;
  ConductivityModel conductivity = ConductivityModel::Constant;
  // Projector for the partially rate-independent variant. When present the
  // viscous term acts on A*rate only and the activation set splits into a
  // ball of radius rho_S2 on range(A) and one of radius rho_S1 on range(I-A).
  std::optional<Eigen::MatrixXd> A_proj;
  double rho_S1 = 0.1;
  double rho_S2 = 0.1;
  bool magnetostatics = true;
  double pad_factor = 4.0;

  double q_conjugate() const { return q / (q - 1.0); }
  // Admissible magnetisation radius: twice the zero-temperature easy-axis magnitude.
  double r_max() const;
};

struct Violation {
  std::string field;
  std::string message;
  bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_material(const Material& mat);
// Same checks plus dimension consistency against a d-dimensional problem.
std::vector<Violation> validate_material(const Material& mat, int d);

struct VectorKeyframe {
  double t = 0.0;
  std::vector<double> value;
};

struct ScalarKeyframe {
  double t = 0.0;
  double value = 0.0;
};

struct Schedule {
  std::vector<VectorKeyframe> h;         // uniform-in-space external field
  std::vector<ScalarKeyframe> theta_ext;
  double b = 0.0;                        // heat-transfer coefficient on the boundary
  double T_end = 1.0;
  double tau = 0.01;

  int steps() const;
  void validate(int d) const;
};

struct ScheduleSample {
  VectorField h;
  VectorField hdot;
  double theta_ext = 0.0;
  double b = 0.0;
};

// h and theta_ext at time t; hdot is the slope of the segment starting at or
// before t (right-continuous). Beyond the last keyframe h is held constant.
ScheduleSample sample_schedule(const Schedule& s, const Grid& g, double t);
std::vector<double> schedule_h(const Schedule& s, double t);
std::vector<double> schedule_hdot(const Schedule& s, double t);
double schedule_theta_ext(const Schedule& s, double t);

}  // namespace magmeso
