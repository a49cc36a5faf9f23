#pragma once

// Linear operators phi: W -> V on martingale differences, the fractional
// integration built from them, and the per-term integrability bound.

#include <Eigen/Dense>

#include "tracelab/madic.hpp"
#include "tracelab/subspace.hpp"

namespace tracelab {

// Mean-zero-output operator on difference tensors.  The stored matrix acts
// on the flattened m x ell increment; construction bakes in the input
// projection onto W and the output centering, so apply_vec is total.
struct TransformOp {
  int m = 2;
  int ell = 1;
  Eigen::MatrixXd A;  // m x (m * ell)

  void validate() const;
  Eigen::VectorXd apply_vec(const Eigen::VectorXd& w) const;
  Eigen::VectorXd apply_diff(const Eigen::MatrixXd& d) const;
  // Largest singular value.
  double op_norm() const;
};

// raw is any m x (m * ell) matrix; the result is center o raw o project.
TransformOp make_transform(const Subspace& W, const Eigen::MatrixXd& raw);
TransformOp random_transform(const Subspace& W, uint64_t seed);
// phi[x]_j = x_{j, comp} minus its mean over j (identity-like selector).
TransformOp coordinate_transform(const Subspace& W, int comp);

struct CancelReport {
  bool canceling = true;
  // Largest |phi[w]_j| over extremal w and support coordinates j, relative
  // to |phi| |w|.
  double max_ratio = 0.0;
  int witness_class = -1;
  int witness_coordinate = -1;
};

// phi is canceling of order alpha when it annihilates every extremal vector
// on its own support coordinates.
CancelReport is_canceling(const TransformOp& phi, const Subspace& W,
                          double alpha, double tol = 1e-10);

enum class DiffPolicy {
  Strict,   // reject martingales with any difference off W
  Project,  // repair by projecting each difference onto W
};

// Partial sum of the fractional integration: scalar-valued martingale whose
// depth-N leaf value on gamma is
//   sum_{n < N} m^(-alpha (n + weight_shift)) (phi[dF_{n+1}|_omega])_{gamma(n)}.
// weight_shift 0 indexes the weight by the parent level; shift 1 rescales
// every term by m^(-alpha), which makes the one-step recursion
// y_kid = m^alpha y + phi_j exact (the form the supermartingale check uses).
SimpleMartingale i_alpha_partial(const SimpleMartingale& F, const Subspace& W,
                                 const TransformOp& phi, double alpha, int N,
                                 int weight_shift = 0,
                                 DiffPolicy policy = DiffPolicy::Strict,
                                 double tol = 1e-9);

// (E |F_{n+1} - F_n|^q)^(1/q) where the difference is a depth-(n+1) field.
double difference_lq_norm(const SimpleMartingale& F, int parent_level,
                          double q);

struct HlsBound {
  double lhs = 0.0;     // |dF_n|_q
  double middle = 0.0;  // m^((q-1)(n+1)/q) |dF_n|_1
  double rhs = 0.0;     // 2 m^((q-1)(n+1)/q) |F|_1
  bool ok = false;
};

// Per-term integrability chain with the explicit constant 2.
HlsBound hls_term_bound(const SimpleMartingale& F, double q, int parent_level);

}  // namespace tracelab
