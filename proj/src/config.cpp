#include "magmeso/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace magmeso {

namespace {

using nlohmann::json;

void only_keys(const json& j, const char* section, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(std::string("config: section '") + section + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError(std::string("config: unknown key '") + it.key() + "' in " + section);
}

template <class T>
void get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Grid parse_grid(const json& j) {
  only_keys(j, "grid", {"dim", "n", "length"});
  const int dim = j.value("dim", 1);
  const auto n = j.at("n").get<std::vector<int>>();
  std::vector<double> len = j.value("length", std::vector<double>(dim, 1.0));
  if (static_cast<int>(n.size()) != dim || static_cast<int>(len.size()) != dim)
    throw ConfigError("config: grid.n and grid.length need dim entries");
  Grid g = dim == 1 ? Grid::make_1d(n[0], len[0]) : dim == 2 ? Grid::make_2d(n[0], n[1], len[0], len[1])
                                                             : throw ConfigError("config: grid.dim must be 1 or 2");
  return g;
}

Material parse_material(const json& j) {
  only_keys(j, "material",
            {"a0", "b0", "theta_c", "beta_aniso", "easy_axes", "p", "b_p", "eps_visc", "q", "shape", "rho",
             "rho_box", "kappa", "mu0", "cv_c0", "cv_omega", "kappa0", "C_K", "conductivity", "A_proj", "rho_S1",
             "rho_S2", "magnetostatics", "pad_factor"});
  Material m;
  get(j, "a0", m.a0);
  get(j, "b0", m.b0);
  get(j, "theta_c", m.theta_c);
  get(j, "beta_aniso", m.beta_aniso);
  get(j, "easy_axes", m.easy_axes);
  get(j, "p", m.p);
  get(j, "b_p", m.b_p);
  get(j, "eps_visc", m.eps_visc);
  get(j, "q", m.q);
  if (j.contains("shape")) {
    const auto s = j.at("shape").get<std::string>();
    if (s == "ball")
      m.shape = ActivationShape::Ball;
    else if (s == "box")
      m.shape = ActivationShape::Box;
    else
      throw ConfigError("config: material.shape must be 'ball' or 'box'");
  }
  get(j, "rho", m.rho);
  get(j, "rho_box", m.rho_box);
  get(j, "kappa", m.kappa_pen);
  get(j, "mu0", m.mu0);
  get(j, "cv_c0", m.cv_c0);
  get(j, "cv_omega", m.cv_omega);
  get(j, "kappa0", m.kappa0);
  get(j, "C_K", m.C_K);
  if (j.contains("conductivity")) {
    const auto s = j.at("conductivity").get<std::string>();
    if (s == "constant")
      m.conductivity = ConductivityModel::Constant;
    else if (s == "clamped")
      m.conductivity = ConductivityModel::Clamped;
    else
      throw ConfigError("config: material.conductivity must be 'constant' or 'clamped'");
  }
  if (j.contains("A_proj")) {
    const auto rows = j.at("A_proj").get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd A(rows.size(), rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.size()) throw ConfigError("config: material.A_proj must be square");
      for (std::size_t c = 0; c < rows.size(); ++c) A(r, c) = rows[r][c];
    }
    m.A_proj = A;
  }
  get(j, "rho_S1", m.rho_S1);
  get(j, "rho_S2", m.rho_S2);
  get(j, "magnetostatics", m.magnetostatics);
  get(j, "pad_factor", m.pad_factor);
  return m;
}

Schedule parse_schedule(const json& j) {
  only_keys(j, "schedule", {"T_end", "tau", "b", "h", "theta_ext"});
  Schedule s;
  get(j, "T_end", s.T_end);
  get(j, "tau", s.tau);
  get(j, "b", s.b);
  if (j.contains("h"))
    for (const auto& k : j.at("h")) {
      only_keys(k, "schedule.h", {"t", "value"});
      s.h.push_back({k.at("t").get<double>(), k.at("value").get<std::vector<double>>()});
    }
  if (j.contains("theta_ext"))
    for (const auto& k : j.at("theta_ext")) {
      only_keys(k, "schedule.theta_ext", {"t", "value"});
      s.theta_ext.push_back({k.at("t").get<double>(), k.at("value").get<double>()});
    }
  return s;
}

void parse_solver(const json& j, Config& c) {
  only_keys(j, "solver",
            {"reg_weight", "tol_nu", "max_fw", "tol_lambda", "max_lambda", "tol_alt", "max_sweeps", "order",
             "flow_audit", "dict_n1d", "dict_angles", "dict_radii", "direct_limit", "cg_tol"});
  IncrementOptions& o = c.inc;
  get(j, "reg_weight", o.reg_weight);
  get(j, "tol_nu", o.tol_nu);
  get(j, "max_fw", o.max_fw);
  get(j, "tol_lambda", o.tol_lambda);
  get(j, "max_lambda", o.max_lambda);
  get(j, "tol_alt", o.tol_alt);
  get(j, "max_sweeps", o.max_sweeps);
  get(j, "flow_audit", o.flow_audit);
  if (j.contains("order")) {
    const auto s = j.at("order").get<std::string>();
    if (s != "nu_first" && s != "lambda_first") throw ConfigError("config: solver.order must be nu_first|lambda_first");
    o.nu_first = s == "nu_first";
  }
  get(j, "dict_n1d", c.dict.n1d);
  get(j, "dict_angles", c.dict.angles);
  get(j, "dict_radii", c.dict.radii);
  get(j, "direct_limit", c.elliptic.direct_limit);
  get(j, "cg_tol", c.elliptic.cg_tol);
}

void parse_run(const json& j, RunOptions& r) {
  only_keys(j, "run",
            {"seed", "snapshot_every", "isothermal", "semistability", "kappa_ladder", "tau_levels", "tau_coarse",
             "checkpoints", "period", "theta_values"});
  get(j, "seed", r.seed);
  get(j, "snapshot_every", r.snapshot_every);
  get(j, "isothermal", r.isothermal);
  get(j, "semistability", r.semistability);
  get(j, "kappa_ladder", r.kappa_ladder);
  get(j, "tau_levels", r.tau_levels);
  get(j, "tau_coarse", r.tau_coarse);
  get(j, "checkpoints", r.checkpoints);
  get(j, "period", r.period);
  get(j, "theta_values", r.theta_values);
}

}  // namespace

Config parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Config c;
  try {
    only_keys(j, "root", {"grid", "material", "schedule", "initial", "solver", "run"});
    c.grid = parse_grid(j.at("grid"));
    if (j.contains("material")) c.mat = parse_material(j.at("material"));
    if (j.contains("schedule")) c.schedule = parse_schedule(j.at("schedule"));
    if (j.contains("initial")) {
      only_keys(j.at("initial"), "initial", {"theta"});
      get(j.at("initial"), "theta", c.theta0);
    }
    if (j.contains("solver")) parse_solver(j.at("solver"), c);
    if (j.contains("run")) parse_run(j.at("run"), c.run);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.inc.audit_seed = c.run.seed;
  if (c.schedule.h.empty()) c.schedule.h.push_back({0.0, std::vector<double>(c.grid.dim, 0.0)});
  if (c.schedule.theta_ext.empty()) c.schedule.theta_ext.push_back({0.0, c.theta0});
  validate_config(c);
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const Config& c) {
  c.grid.validate();
  const auto v = validate_material(c.mat, c.grid.dim);
  if (!v.empty()) {
    std::string msg = "config: invalid material:";
    for (const auto& x : v) msg += " [" + x.field + ": " + x.message + "]";
    throw ConfigError(msg);
  }
  c.schedule.validate(c.grid.dim);
  if (!(c.theta0 >= 0)) throw ConfigError("config: initial.theta must be >= 0");
  if (c.dict.n1d < 2 || c.dict.angles < 1 || c.dict.radii < 1) throw ConfigError("config: dictionary too small");
  for (double k : c.run.kappa_ladder)
    if (!(k > 0)) throw ConfigError("config: run.kappa_ladder entries must be > 0");
  if (c.run.tau_levels < 2) throw ConfigError("config: run.tau_levels must be >= 2");
  if (c.run.checkpoints < 1) throw ConfigError("config: run.checkpoints must be >= 1");
  if (c.run.period < 0) throw ConfigError("config: run.period must be >= 0");
  for (double t : c.run.theta_values)
    if (!(t >= 0)) throw ConfigError("config: run.theta_values must be >= 0");
}

Dictionary make_dictionary(const Config& cfg) {
  return make_dictionary(cfg.grid.dim, cfg.mat.r_max(), cfg.dict.n1d, cfg.dict.angles, cfg.dict.radii);
}

}  // namespace magmeso
