#include "tracelab/transform.hpp"

#include <cmath>
#include <string>

namespace tracelab {

void TransformOp::validate() const {
  require(m >= 2 && ell >= 1, "TransformOp: bad dimensions");
  require(A.rows() == m && A.cols() == int64_t(m) * ell,
          "TransformOp: matrix must be m x (m*ell)");
  require(A.allFinite(), "TransformOp: entries must be finite");
}

Eigen::VectorXd TransformOp::apply_vec(const Eigen::VectorXd& w) const {
  require(w.size() == int64_t(m) * ell, "TransformOp: input has wrong length");
  return A * w;
}

Eigen::VectorXd TransformOp::apply_diff(const Eigen::MatrixXd& d) const {
  return apply_vec(tensor_vec(d));
}

double TransformOp::op_norm() const {
  if (A.size() == 0) return 0.0;
  return A.jacobiSvd().singularValues()[0];
}

TransformOp make_transform(const Subspace& W, const Eigen::MatrixXd& raw) {
  W.validate();
  require(raw.rows() == W.m && raw.cols() == W.ambient_dim(),
          "make_transform: raw matrix must be m x (m*ell)");
  TransformOp phi;
  phi.m = W.m;
  phi.ell = W.ell;
  // Restrict the input to W, then center the output.
  Eigen::MatrixXd A = raw * (W.basis.transpose() * W.basis);
  A.rowwise() -= A.colwise().mean();
  phi.A = A;
  return phi;
}

TransformOp random_transform(const Subspace& W, uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd raw(W.m, W.ambient_dim());
  for (int i = 0; i < raw.rows(); ++i) {
    for (int j = 0; j < raw.cols(); ++j) raw(i, j) = rng.normal();
  }
  return make_transform(W, raw);
}

TransformOp coordinate_transform(const Subspace& W, int comp) {
  require(comp >= 0 && comp < W.ell, "coordinate_transform: bad component");
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(W.m, W.ambient_dim());
  for (int j = 0; j < W.m; ++j) raw(j, int64_t(j) * W.ell + comp) = 1.0;
  return make_transform(W, raw);
}

CancelReport is_canceling(const TransformOp& phi, const Subspace& W,
                          double alpha, double tol) {
  phi.validate();
  require(phi.m == W.m && phi.ell == W.ell,
          "is_canceling: operator and space dimensions differ");
  CancelReport rep;
  const double norm_phi = phi.op_norm();
  const auto classes = extremal_vectors(W, alpha);
  for (size_t ci = 0; ci < classes.size(); ++ci) {
    const ExtremalClass& cls = classes[ci];
    for (int dc = 0; dc < cls.directions.cols(); ++dc) {
      const Eigen::MatrixXd wmat = cls.v * cls.directions.col(dc).transpose();
      const Eigen::VectorXd w = tensor_vec(wmat);
      const Eigen::VectorXd u = phi.apply_vec(w);
      const double scale = std::max(norm_phi * w.norm(), 1e-300);
      for (int j : cls.support) {
        const double ratio = std::abs(u[j]) / scale;
        if (ratio > rep.max_ratio) {
          rep.max_ratio = ratio;
          rep.witness_class = int(ci);
          rep.witness_coordinate = j;
        }
      }
    }
  }
  rep.canceling = rep.max_ratio <= tol;
  return rep;
}

SimpleMartingale i_alpha_partial(const SimpleMartingale& F, const Subspace& W,
                                 const TransformOp& phi, double alpha, int N,
                                 int weight_shift, DiffPolicy policy,
                                 double tol) {
  F.validate();
  W.validate();
  require(F.shape.m == W.m && F.shape.ell == W.ell,
          "i_alpha_partial: martingale and space dimensions differ");
  require(N >= 0 && N <= F.shape.depth, "i_alpha_partial: level out of range");
  require(alpha > 0.0 && alpha < 1.0, "i_alpha_partial: alpha must be in (0,1)");

  const int m = F.shape.m;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(1);
  for (int n = 0; n < N; ++n) {
    const int64_t parents = ipow(m, n);
    const double weight =
        std::pow(double(m), -alpha * double(n + weight_shift));
    Eigen::VectorXd next(parents * m);
    for (int64_t p = 0; p < parents; ++p) {
      Eigen::VectorXd d = tensor_vec(F.difference(n, p));
      if (policy == DiffPolicy::Strict) {
        const double res = W.membership_residual(d);
        if (res > tol) {
          throw Error("i_alpha_partial: difference off W at level " +
                      std::to_string(n) + ", atom " + std::to_string(p) +
                      " (residual " + std::to_string(res) + ")");
        }
      } else {
        d = W.project(d);
      }
      const Eigen::VectorXd u = phi.apply_vec(d);
      for (int j = 0; j < m; ++j) next[p * m + j] = acc[p] + weight * u[j];
    }
    acc = std::move(next);
  }
  SimpleMartingale out;
  out.shape = TreeShape{m, N, 1};
  out.leaves = acc;
  return out;
}

double difference_lq_norm(const SimpleMartingale& F, int parent_level,
                          double q) {
  require(q >= 1.0, "difference_lq_norm: exponent must be at least 1");
  require(parent_level >= 0 && parent_level < F.shape.depth,
          "difference_lq_norm: level out of range");
  const Eigen::MatrixXd fine = F.level_values(parent_level + 1);
  const Eigen::MatrixXd coarse = F.level_values(parent_level);
  Eigen::ArrayXd norms(fine.rows());
  for (int64_t i = 0; i < fine.rows(); ++i) {
    norms[i] = (fine.row(i) - coarse.row(i / F.shape.m)).norm();
  }
  return std::pow(norms.pow(q).mean(), 1.0 / q);
}

HlsBound hls_term_bound(const SimpleMartingale& F, double q, int parent_level) {
  HlsBound b;
  const double factor =
      std::pow(double(F.shape.m), (q - 1.0) * double(parent_level + 1) / q);
  b.lhs = difference_lq_norm(F, parent_level, q);
  b.middle = factor * difference_lq_norm(F, parent_level, 1.0);
  b.rhs = 2.0 * factor * F.l1_norm();
  const double slack = 1e-12 * std::max(1.0, b.rhs);
  b.ok = b.lhs <= b.middle + slack && b.middle <= b.rhs + slack;
  return b;
}

}  // namespace tracelab
