#pragma once

#include <iosfwd>
#include <vector>

#include "magmeso/core.hpp"

namespace magmeso {

// Per-cell finite probability measure over R^d.
struct AtomicYoungMeasure {
  Grid grid;
  int d = 1;
  std::vector<std::size_t> offset;  // cells+1 entries into weights
  std::vector<double> atoms;        // d values per atom
  std::vector<double> weights;

  std::size_t cells() const { return grid.cells(); }
  std::size_t atom_count(std::size_t cell) const { return offset[cell + 1] - offset[cell]; }
  const double* atom(std::size_t k) const { return atoms.data() + k * d; }
  void validate(double r_max) const;
};

struct MomentPair {
  VectorField m;    // id . nu
  VectorField Lnu;  // (m, |m|^2-moment)
};

AtomicYoungMeasure dirac(const VectorField& m, double r_max);
MomentPair moments(const AtomicYoungMeasure& nu);
double pth_moment(const AtomicYoungMeasure& nu, double p);
// Euclidean projection onto {w >= 0, sum w = 1}.
std::vector<double> project_simplex(const std::vector<double>& w);
// Smallest per-cell value of Lnu_{d+1} - |m|^2.
double min_jensen_gap(const MomentPair& mp);

// Fixed atom lattice shared by every cell during optimisation.
struct Dictionary {
  int d = 1;
  std::vector<double> atoms;  // d per atom
  std::size_t size() const { return atoms.size() / d; }
  const double* atom(std::size_t j) const { return atoms.data() + j * d; }
  double norm2(std::size_t j) const;
};

// 1D: `n1d` points uniform on [-r_max, r_max]. 2D: origin plus
// `angles` x `radii` polar lattice with radii r_max*k/radii.
Dictionary make_dictionary(int d, double r_max, int n1d = 33, int angles = 12, int radii = 9);

// Weights over a shared dictionary, `cells x K`, row-major.
struct DictMeasure {
  Grid grid;
  Dictionary dict;
  std::vector<double> w;

  std::size_t cells() const { return grid.cells(); }
  std::size_t K() const { return dict.size(); }
  double& operator()(std::size_t i, std::size_t j) { return w[i * K() + j]; }
  double operator()(std::size_t i, std::size_t j) const { return w[i * K() + j]; }
};

// Every cell concentrated on the dictionary atom nearest to m(x).
DictMeasure dict_from_nearest(const Dictionary& dict, const VectorField& m);
MomentPair moments(const DictMeasure& nu);
// Drops weights below `floor` and renormalises each cell.
void prune(DictMeasure& nu, double floor = 1e-14);
AtomicYoungMeasure to_atomic(const DictMeasure& nu);
double max_simplex_defect(const DictMeasure& nu);

// Columns: cell, atom coordinates, weight. Header lines start with '#'.
void write_measure_snapshot(std::ostream& os, const AtomicYoungMeasure& nu, double time);

}  // namespace magmeso
