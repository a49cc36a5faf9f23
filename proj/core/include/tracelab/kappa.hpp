#pragma once

// The concave envelope kappa(theta) = sup of theta * log of the (1/theta)-th
// power mean of |1 + v_j| over admissible profiles v, together with its
// one-sided derivative at theta = 1, an independent grid oracle, and the
// affinity test that detects geometric subspaces.

#include <Eigen/Dense>

#include <vector>

#include "tracelab/subspace.hpp"

namespace tracelab {

struct KappaOptions {
  int starts = 64;       // random multistart count, on top of structured seeds
  int outer_iters = 12;  // alternations between direction and profile steps
  int grad_iters = 60;   // ascent iterations per alternation
  uint64_t seed = 20240901ull;
};

// theta * log( (1/m) * sum_j |1 + v_j|^(1/theta) ), evaluated so that large
// ratios never overflow: the max of |1 + v_j| is factored out first.
// theta = 0 returns log max_j |1 + v_j|.
double kappa_profile(const Eigen::VectorXd& v, double theta);

// (1/m) * sum_j (1 + v_j) * log(1 + v_j), with 0 log 0 = 0.  Defined for
// v_j >= -1; the negative of its sup over admissible profiles is the
// derivative of kappa at theta = 1.
double entropy_functional(const Eigen::VectorXd& v);

struct KappaResult {
  double value = 0.0;
  Eigen::VectorXd v;  // maximizing profile
  Eigen::VectorXd a;  // direction with v (x) a in W
};

// Multistart alternating maximization over admissible profiles.  Structured
// seeds enumerate every two-valued mean-zero profile (value m/h - 1 on a
// subset of size h, -1 elsewhere) that admits a direction; random seeds draw
// from the feasible slice of a random direction.
KappaResult kappa_value(const Subspace& W, double theta,
                        const KappaOptions& opt = {});

// inf over admissible v of -entropy_functional(v); equals the one-sided
// derivative of kappa at theta = 1.
double kappa_derivative_at_one(const Subspace& W, const KappaOptions& opt = {});

// Exhaustive evaluation over the mean-zero lattice with the given step,
// restricted to admissible grid points.  Full spaces are enumerated by
// sorted profiles (the objective is permutation invariant there); proper
// subspaces require m <= 5 and test admissibility pointwise.
double kappa_grid_oracle(const Subspace& W, double theta, double step = 0.1);

struct GeometricReport {
  bool geometric = false;
  // The admissible set held nothing but v = 0; kappa is identically zero and
  // no order can be assigned.
  bool degenerate = false;
  double alpha = 0.0;            // from the derivative at theta = 1
  double alpha_from_zero = 0.0;  // kappa(0) / log m
  // Order with m^(1-alpha) rounded to the exact integer; NaN unless
  // geometric.  Structure-dependent calls (extremal vectors, non-locality)
  // need this snapped value, not the measured one.
  double alpha_snapped = 0.0;
  double max_affine_deviation = 0.0;
  std::vector<double> thetas;
  std::vector<double> values;
  std::vector<ExtremalClass> witnesses;
};

// A space is geometric when kappa is affine: kappa(theta) matches
// (1 - theta) * kappa(0) on a theta grid, the two alpha estimates agree,
// m^(1-alpha) is an integer, and at least one extremal class exists.
GeometricReport is_geometric(const Subspace& W, double tol = 1e-6,
                             const KappaOptions& opt = {});

}  // namespace tracelab
