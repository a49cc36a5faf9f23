#include "tracelab/madic.hpp"

#include <cmath>

namespace tracelab {

void TreeShape::validate() const {
  require(m >= 2, "TreeShape: branching factor must be at least 2");
  require(depth >= 0, "TreeShape: depth must be nonnegative");
  require(ell >= 1, "TreeShape: value dimension must be positive");
  // Guard the leaf count against 64-bit overflow before anyone allocates.
  require(depth * std::log2(double(m)) < 40.0, "TreeShape: tree too large");
}

int64_t AtomPath::index(int m) const {
  int64_t idx = 0;
  for (int d : digits) {
    require(d >= 1 && d <= m, "AtomPath: digit out of range");
    idx = idx * m + (d - 1);
  }
  return idx;
}

AtomPath AtomPath::from_index(int m, int level, int64_t index) {
  require(level >= 0, "AtomPath: negative level");
  require(index >= 0 && index < ipow(m, level), "AtomPath: index out of range");
  AtomPath p;
  p.digits.assign(level, 1);
  for (int i = level - 1; i >= 0; --i) {
    p.digits[i] = int(index % m) + 1;
    index /= m;
  }
  return p;
}

double ultrametric_distance(const AtomPath& a, const AtomPath& b, int m) {
  require(m >= 2, "ultrametric_distance: branching factor must be at least 2");
  size_t shared = 0;
  while (shared < a.digits.size() && shared < b.digits.size() &&
         a.digits[shared] == b.digits[shared]) {
    ++shared;
  }
  return std::pow(double(m), -double(shared));
}

void SimpleMartingale::validate() const {
  shape.validate();
  require(leaves.rows() == shape.leaf_count() && leaves.cols() == shape.ell,
          "SimpleMartingale: leaf matrix has wrong dimensions");
  require(leaves.allFinite(), "SimpleMartingale: leaf values must be finite");
}

Eigen::MatrixXd SimpleMartingale::level_values(int level) const {
  require(level >= 0 && level <= shape.depth,
          "SimpleMartingale: level out of range");
  const int64_t atoms = shape.atoms_at(level);
  const int64_t block = ipow(shape.m, shape.depth - level);
  Eigen::MatrixXd out(atoms, shape.ell);
  for (int64_t i = 0; i < atoms; ++i) {
    out.row(i) = leaves.middleRows(i * block, block).colwise().mean();
  }
  return out;
}

Eigen::VectorXd SimpleMartingale::atom_value(int level, int64_t index) const {
  require(level >= 0 && level <= shape.depth,
          "SimpleMartingale: level out of range");
  require(index >= 0 && index < shape.atoms_at(level),
          "SimpleMartingale: atom index out of range");
  const int64_t block = ipow(shape.m, shape.depth - level);
  return leaves.middleRows(index * block, block).colwise().mean().transpose();
}

Eigen::VectorXd SimpleMartingale::atom_value(const AtomPath& omega) const {
  return atom_value(omega.level(), omega.index(shape.m));
}

Eigen::MatrixXd SimpleMartingale::difference(int parent_level,
                                             int64_t parent_index) const {
  require(parent_level >= 0 && parent_level < shape.depth,
          "SimpleMartingale: difference needs a level below depth");
  Eigen::MatrixXd kids(shape.m, shape.ell);
  for (int j = 0; j < shape.m; ++j) {
    kids.row(j) =
        atom_value(parent_level + 1, parent_index * shape.m + j).transpose();
  }
  kids.rowwise() -= atom_value(parent_level, parent_index).transpose();
  return kids;
}

double SimpleMartingale::l1_norm() const {
  return leaves.rowwise().norm().mean();
}

double SimpleMartingale::lq_norm(int level, double q) const {
  require(q >= 1.0, "SimpleMartingale: exponent must be at least 1");
  const Eigen::VectorXd norms = level_values(level).rowwise().norm();
  return std::pow(norms.array().pow(q).mean(), 1.0 / q);
}

void TreeMeasure::validate() const {
  require(m >= 2, "TreeMeasure: branching factor must be at least 2");
  require(depth >= 0, "TreeMeasure: depth must be nonnegative");
  require(depth * std::log2(double(m)) < 40.0, "TreeMeasure: tree too large");
  require(leaf_mass.size() == leaf_count(),
          "TreeMeasure: leaf mass vector has wrong length");
  require(leaf_mass.allFinite(), "TreeMeasure: masses must be finite");
  require((leaf_mass.array() >= 0.0).all(),
          "TreeMeasure: masses must be nonnegative");
}

double TreeMeasure::atom_mass(int level, int64_t index) const {
  require(level >= 0 && level <= depth, "TreeMeasure: level out of range");
  require(index >= 0 && index < ipow(m, level),
          "TreeMeasure: atom index out of range");
  const int64_t block = ipow(m, depth - level);
  return leaf_mass.segment(index * block, block).sum();
}

SimpleMartingale measure_to_martingale(const TreeMeasure& nu) {
  nu.validate();
  SimpleMartingale f;
  f.shape = TreeShape{nu.m, nu.depth, 1};
  // Leaf density: mass divided by the leaf's share 1/m^N of the unit tree.
  f.leaves = nu.leaf_mass * double(ipow(nu.m, nu.depth));
  return f;
}

TreeMeasure martingale_to_measure(const SimpleMartingale& f) {
  f.validate();
  require(f.shape.ell == 1, "martingale_to_measure: needs scalar values");
  require((f.leaves.array() >= 0.0).all(),
          "martingale_to_measure: needs nonnegative leaves");
  TreeMeasure nu;
  nu.m = f.shape.m;
  nu.depth = f.shape.depth;
  nu.leaf_mass = f.leaves.col(0) / double(ipow(f.shape.m, f.shape.depth));
  return nu;
}

}  // namespace tracelab
