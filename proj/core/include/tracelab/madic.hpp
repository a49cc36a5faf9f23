#pragma once

// m-adic filtration trees: atoms, simple martingales, tree measures, and the
// measure <-> density-martingale correspondence.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "tracelab/common.hpp"

namespace tracelab {

// Depth-`depth` m-ary tree carrying R^ell-valued leaf data.
struct TreeShape {
  int m = 2;      // branching factor
  int depth = 1;  // number of refinement levels below the root
  int ell = 1;    // value dimension

  void validate() const;
  int64_t leaf_count() const { return ipow(m, depth); }
  int64_t atoms_at(int level) const { return ipow(m, level); }
};

// Atom address: digit string over [1..m]; level = number of digits, the root
// is the empty string.  Atoms of one level are ordered lexicographically by
// their digit strings, which also fixes the kid enumeration everywhere.
struct AtomPath {
  std::vector<int> digits;

  int level() const { return int(digits.size()); }
  // Lexicographic rank among atoms of the same level.
  int64_t index(int m) const;
  static AtomPath from_index(int m, int level, int64_t index);
};

// m^{-(length of common digit prefix)}; equals 1 when the first digits differ.
double ultrametric_distance(const AtomPath& a, const AtomPath& b, int m);

// Martingale adapted to the m-adic filtration, stored by its deepest level:
// row i of `leaves` is the value on the i-th depth-N atom.  Every coarser
// F_n is the block average of the leaves, so the tower property holds by
// construction.
struct SimpleMartingale {
  TreeShape shape;
  Eigen::MatrixXd leaves;  // leaf_count x ell

  void validate() const;

  // All values at `level`, as an atoms_at(level) x ell matrix.
  Eigen::MatrixXd level_values(int level) const;
  // Mean of the leaves below one atom.
  Eigen::VectorXd atom_value(int level, int64_t index) const;
  Eigen::VectorXd atom_value(const AtomPath& omega) const;

  // Kid values minus the parent value, as an m x ell matrix whose row j-1
  // corresponds to digit j.  Column means are zero.
  Eigen::MatrixXd difference(int parent_level, int64_t parent_index) const;

  // E|F_depth| with the Euclidean norm on R^ell.
  double l1_norm() const;
  // (E |F_level|^q)^{1/q}.
  double lq_norm(int level, double q) const;
};

// Nonnegative measure on the depth-N leaf algebra, stored by leaf masses.
struct TreeMeasure {
  int m = 2;
  int depth = 0;
  Eigen::VectorXd leaf_mass;

  void validate() const;
  int64_t leaf_count() const { return ipow(m, depth); }
  double total() const { return leaf_mass.sum(); }
  // Sum of leaf masses below one atom.
  double atom_mass(int level, int64_t index) const;
};

// Density martingale of nu: atom value = m^level * nu(atom), ell = 1.
SimpleMartingale measure_to_martingale(const TreeMeasure& nu);
// Inverse of the above; requires ell == 1 and nonnegative leaves.
TreeMeasure martingale_to_measure(const SimpleMartingale& f);

}  // namespace tracelab
