#pragma once

// Subspaces of the difference space V (x) R^ell, where V is the mean-zero
// hyperplane of R^m.  Elements are m x ell matrices with zero column means,
// flattened row-major: vec index of entry (j, c) is j*ell + c.

#include <Eigen/Dense>

#include <vector>

#include "tracelab/common.hpp"

namespace tracelab {

Eigen::VectorXd tensor_vec(const Eigen::MatrixXd& x);
Eigen::MatrixXd tensor_unvec(const Eigen::VectorXd& v, int m, int ell);

struct Subspace {
  int m = 2;
  int ell = 1;
  // k x (m*ell), rows orthonormal.  The zero subspace has zero rows.
  Eigen::MatrixXd basis;
  // Set when the space is the real identification of a complex one; real
  // direction counts then come in pairs (multiplication by i).
  bool complexified = false;

  void validate() const;
  int dim() const { return int(basis.rows()); }
  int ambient_dim() const { return m * ell; }

  // Orthogonal projection onto the subspace.
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  // |x - P x| / max(|x|, 1), zero vector gives 0.
  double membership_residual(const Eigen::VectorXd& x) const;
  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;

  // Orthonormalizes the given spanning rows (dropping near-dependent ones)
  // and checks that every row has zero column means.
  static Subspace from_rows(int m, int ell, const Eigen::MatrixXd& rows,
                            bool complexified = false);
  // The whole difference space, dimension (m-1)*ell.
  static Subspace full(int m, int ell);
};

// Orthonormal basis (ell x r, columns) of {a : v (x) a lies in W}.
Eigen::MatrixXd admissible_directions(const Subspace& W,
                                      const Eigen::VectorXd& v,
                                      double tol = 1e-9);

// One equivalence class of extremal vectors v (x) a: the support H where
// 1 + v_j = m^alpha, the profile v itself, and an orthonormal basis of the
// admissible directions a.
struct ExtremalClass {
  std::vector<int> support;     // 0-based coordinates j with v_j = m^alpha - 1
  Eigen::VectorXd v;            // length m
  Eigen::MatrixXd directions;   // ell x r, orthonormal columns
};

// All extremal classes of order alpha: supports H with |H| = m^{1-alpha}
// whose two-valued profile admits at least one direction.  Requires
// m^{1-alpha} to be an integer in [1, m); exhaustive over subsets, so m is
// capped at 16.
std::vector<ExtremalClass> extremal_vectors(const Subspace& W, double alpha,
                                            double tol = 1e-9);

struct NonLocalityReport {
  bool nonlocal = false;
  // True when there are no extremal vectors at all, which makes the
  // condition hold vacuously.
  bool vacuous = false;
  std::vector<ExtremalClass> classes;
  // Per class: dimension of the solution space {(w, b) : b + w_j = 0 off H}
  // and of the subspace {(v (x) a, a)} it must not exceed.
  std::vector<int> solution_dims;
  std::vector<int> expected_dims;
};

// Checks that for every extremal class the pairs (w, b) with w in W and
// b + w_j = 0 for all j outside H are exactly the pairs (v (x) a, a), and
// that the directions form a single line over the base field.
NonLocalityReport is_nonlocal(const Subspace& W, double alpha,
                              double tol = 1e-9);

// avg_j |x_j| / |mean_j x_j| - 1; zero exactly on rank-one elements with a
// constant-sign profile, +infinity when the mean row vanishes.
double flatness_measure(const Eigen::MatrixXd& x);

// min over extremal classes and scalings of sum_j |x_j - (1+v_j) a'| with
// a' in the class's direction span; ties broken by enumeration order.
struct RankOneFit {
  double distance = 0.0;
  int class_index = -1;
  Eigen::MatrixXd nearest;  // m x ell
};
RankOneFit nearest_rank_one(const Eigen::MatrixXd& x, const Subspace& W,
                            double alpha);

}  // namespace tracelab
