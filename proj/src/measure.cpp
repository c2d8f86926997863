#include "magmeso/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace magmeso {

void AtomicYoungMeasure::validate(double r_max) const {
  if (offset.size() != cells() + 1) throw ConfigError("measure: offset table does not match grid");
  for (std::size_t i = 0; i < cells(); ++i) {
    double s = 0.0;
    for (std::size_t k = offset[i]; k < offset[i + 1]; ++k) {
      if (weights[k] < 0) throw ConfigError("measure: negative weight");
      s += weights[k];
      double n2 = 0;
      for (int c = 0; c < d; ++c) n2 += atom(k)[c] * atom(k)[c];
      if (std::sqrt(n2) > r_max * (1 + 1e-12)) throw ConfigError("measure: atom outside admissible ball");
    }
    if (std::abs(s - 1.0) > 1e-12) throw ConfigError("measure: weights do not sum to one");
  }
}

AtomicYoungMeasure dirac(const VectorField& m, double r_max) {
  AtomicYoungMeasure nu;
  nu.grid = m.grid;
  nu.d = m.comps;
  nu.offset.resize(m.cells() + 1);
  nu.atoms = m.values;
  nu.weights.assign(m.cells(), 1.0);
  for (std::size_t i = 0; i <= m.cells(); ++i) nu.offset[i] = i;
  for (std::size_t i = 0; i < m.cells(); ++i) {
    double n2 = 0;
    for (int c = 0; c < m.comps; ++c) n2 += m.at(i, c) * m.at(i, c);
    if (std::sqrt(n2) > r_max * (1 + 1e-12)) throw ConfigError("dirac: atom outside admissible ball");
  }
  return nu;
}

MomentPair moments(const AtomicYoungMeasure& nu) {
  MomentPair mp{VectorField(nu.grid, nu.d), VectorField(nu.grid, nu.d + 1)};
  for (std::size_t i = 0; i < nu.cells(); ++i) {
    double* m = mp.m.cell(i);
    double* L = mp.Lnu.cell(i);
    for (std::size_t k = nu.offset[i]; k < nu.offset[i + 1]; ++k) {
      const double w = nu.weights[k];
      const double* s = nu.atom(k);
      double n2 = 0;
      for (int c = 0; c < nu.d; ++c) {
        m[c] += w * s[c];
        n2 += s[c] * s[c];
      }
      L[nu.d] += w * n2;
    }
    for (int c = 0; c < nu.d; ++c) L[c] = m[c];
  }
  return mp;
}

double pth_moment(const AtomicYoungMeasure& nu, double p) {
  double total = 0.0;
  for (std::size_t i = 0; i < nu.cells(); ++i)
    for (std::size_t k = nu.offset[i]; k < nu.offset[i + 1]; ++k) {
      double n2 = 0;
      for (int c = 0; c < nu.d; ++c) n2 += nu.atom(k)[c] * nu.atom(k)[c];
      total += nu.weights[k] * std::pow(n2, 0.5 * p);
    }
  return total * nu.grid.cell_volume();
}

std::vector<double> project_simplex(const std::vector<double>& w) {
  if (w.empty()) return {};
  std::vector<double> u = w;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0) theta = t;
  }
  std::vector<double> out(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) out[k] = std::max(w[k] - theta, 0.0);
  return out;
}

double min_jensen_gap(const MomentPair& mp) {
  double g = std::numeric_limits<double>::infinity();
  const int d = mp.m.comps;
  for (std::size_t i = 0; i < mp.m.cells(); ++i) {
    double n2 = 0;
    for (int c = 0; c < d; ++c) n2 += mp.m.at(i, c) * mp.m.at(i, c);
    g = std::min(g, mp.Lnu.at(i, d) - n2);
  }
  return g;
}

double Dictionary::norm2(std::size_t j) const {
  double n2 = 0;
  for (int c = 0; c < d; ++c) n2 += atom(j)[c] * atom(j)[c];
  return n2;
}

Dictionary make_dictionary(int d, double r_max, int n1d, int angles, int radii) {
  Dictionary D;
  D.d = d;
  if (d == 1) {
    if (n1d < 2) throw ConfigError("dictionary: need at least two atoms");
    for (int k = 0; k < n1d; ++k) D.atoms.push_back(-r_max + 2.0 * r_max * k / (n1d - 1));
  } else if (d == 2) {
    D.atoms = {0.0, 0.0};
    const double pi = std::acos(-1.0);
    for (int r = 1; r <= radii; ++r)
      for (int a = 0; a < angles; ++a) {
        const double rad = r_max * r / radii;
        const double ang = 2.0 * pi * a / angles;
        D.atoms.push_back(rad * std::cos(ang));
        D.atoms.push_back(rad * std::sin(ang));
      }
  } else {
    throw ConfigError("dictionary: d must be 1 or 2");
  }
  return D;
}

DictMeasure dict_from_nearest(const Dictionary& dict, const VectorField& m) {
  DictMeasure nu{m.grid, dict, std::vector<double>(m.cells() * dict.size(), 0.0)};
  for (std::size_t i = 0; i < m.cells(); ++i) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < dict.size(); ++j) {
      double dist = 0;
      for (int c = 0; c < dict.d; ++c) {
        const double e = dict.atom(j)[c] - m.at(i, c);
        dist += e * e;
      }
      if (dist < bd) {
        bd = dist;
        best = j;
      }
    }
    nu(i, best) = 1.0;
  }
  return nu;
}

MomentPair moments(const DictMeasure& nu) {
  const int d = nu.dict.d;
  MomentPair mp{VectorField(nu.grid, d), VectorField(nu.grid, d + 1)};
  const std::size_t K = nu.K();
  for (std::size_t i = 0; i < nu.cells(); ++i) {
    double* m = mp.m.cell(i);
    double* L = mp.Lnu.cell(i);
    for (std::size_t j = 0; j < K; ++j) {
      const double w = nu.w[i * K + j];
      if (w == 0.0) continue;
      const double* s = nu.dict.atom(j);
      for (int c = 0; c < d; ++c) m[c] += w * s[c];
      L[d] += w * nu.dict.norm2(j);
    }
    for (int c = 0; c < d; ++c) L[c] = m[c];
  }
  return mp;
}

void prune(DictMeasure& nu, double floor) {
  const std::size_t K = nu.K();
  for (std::size_t i = 0; i < nu.cells(); ++i) {
    double* w = nu.w.data() + i * K;
    double s = 0;
    for (std::size_t j = 0; j < K; ++j) {
      if (w[j] < floor) w[j] = 0.0;
      s += w[j];
    }
    if (!(s > 0)) throw SolverError("prune: cell lost all mass");
    for (std::size_t j = 0; j < K; ++j) w[j] /= s;
  }
}

AtomicYoungMeasure to_atomic(const DictMeasure& nu) {
  AtomicYoungMeasure a;
  a.grid = nu.grid;
  a.d = nu.dict.d;
  a.offset.push_back(0);
  const std::size_t K = nu.K();
  for (std::size_t i = 0; i < nu.cells(); ++i) {
    for (std::size_t j = 0; j < K; ++j) {
      const double w = nu.w[i * K + j];
      if (w <= 0.0) continue;
      for (int c = 0; c < a.d; ++c) a.atoms.push_back(nu.dict.atom(j)[c]);
      a.weights.push_back(w);
    }
    a.offset.push_back(a.weights.size());
  }
  return a;
}

double max_simplex_defect(const DictMeasure& nu) {
  double worst = 0.0;
  const std::size_t K = nu.K();
  for (std::size_t i = 0; i < nu.cells(); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < K; ++j) {
      const double w = nu.w[i * K + j];
      worst = std::max(worst, -w);
      s += w;
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

void write_measure_snapshot(std::ostream& os, const AtomicYoungMeasure& nu, double time) {
  char buf[64];
  os << "# field=young_measure dim=" << nu.grid.dim << " extents=" << nu.grid.extents[0];
  if (nu.grid.dim == 2) os << "x" << nu.grid.extents[1];
  std::snprintf(buf, sizeof buf, "%.17g", time);
  os << " time=" << buf << "\n# cell";
  for (int c = 0; c < nu.d; ++c) os << ",atom_" << c;
  os << ",weight\n";
  for (std::size_t i = 0; i < nu.cells(); ++i)
    for (std::size_t k = nu.offset[i]; k < nu.offset[i + 1]; ++k) {
      os << i;
      for (int c = 0; c < nu.d; ++c) {
        std::snprintf(buf, sizeof buf, ",%.17g", nu.atom(k)[c]);
        os << buf;
      }
      std::snprintf(buf, sizeof buf, ",%.17g\n", nu.weights[k]);
      os << buf;
    }
}

}  // namespace magmeso
