#include "tracelab/subspace.hpp"

#include <cmath>
#include <limits>

namespace tracelab {

Eigen::VectorXd tensor_vec(const Eigen::MatrixXd& x) {
  Eigen::VectorXd v(x.size());
  for (int j = 0; j < x.rows(); ++j) {
    v.segment(int64_t(j) * x.cols(), x.cols()) = x.row(j).transpose();
  }
  return v;
}

Eigen::MatrixXd tensor_unvec(const Eigen::VectorXd& v, int m, int ell) {
  require(v.size() == int64_t(m) * ell, "tensor_unvec: wrong length");
  Eigen::MatrixXd x(m, ell);
  for (int j = 0; j < m; ++j) {
    x.row(j) = v.segment(int64_t(j) * ell, ell).transpose();
  }
  return x;
}

void Subspace::validate() const {
  require(m >= 2, "Subspace: branching factor must be at least 2");
  require(ell >= 1, "Subspace: value dimension must be positive");
  require(basis.cols() == ambient_dim(),
          "Subspace: basis rows must have length m * ell");
  require(basis.rows() <= (int64_t(m) - 1) * ell,
          "Subspace: dimension exceeds the difference space");
  if (basis.rows() == 0) return;
  const Eigen::MatrixXd gram = basis * basis.transpose();
  require((gram - Eigen::MatrixXd::Identity(dim(), dim()))
                  .lpNorm<Eigen::Infinity>() < 1e-8,
          "Subspace: basis rows must be orthonormal");
  for (int r = 0; r < dim(); ++r) {
    const Eigen::MatrixXd row = tensor_unvec(basis.row(r).transpose(), m, ell);
    require(row.colwise().mean().lpNorm<Eigen::Infinity>() < 1e-8,
            "Subspace: basis rows must have zero column means");
  }
}

Eigen::VectorXd Subspace::project(const Eigen::VectorXd& x) const {
  require(x.size() == ambient_dim(), "Subspace: vector has wrong length");
  if (dim() == 0) return Eigen::VectorXd::Zero(ambient_dim());
  return basis.transpose() * (basis * x);
}

double Subspace::membership_residual(const Eigen::VectorXd& x) const {
  const double nx = x.norm();
  if (nx == 0.0) return 0.0;
  return (x - project(x)).norm() / std::max(nx, 1.0);
}

bool Subspace::contains(const Eigen::VectorXd& x, double tol) const {
  return membership_residual(x) <= tol;
}

Subspace Subspace::from_rows(int m, int ell, const Eigen::MatrixXd& rows,
                             bool complexified) {
  require(rows.cols() == int64_t(m) * ell,
          "Subspace::from_rows: rows must have length m * ell");
  for (int r = 0; r < rows.rows(); ++r) {
    const Eigen::MatrixXd mat = tensor_unvec(rows.row(r).transpose(), m, ell);
    require(mat.colwise().mean().lpNorm<Eigen::Infinity>() <=
                1e-9 * std::max(1.0, rows.row(r).norm()),
            "Subspace::from_rows: rows must have zero column means");
  }
  Subspace W;
  W.m = m;
  W.ell = ell;
  W.complexified = complexified;
  if (rows.rows() == 0) {
    W.basis.resize(0, int64_t(m) * ell);
    return W;
  }
  // Rows that already form an orthonormal system are kept verbatim, so a
  // save/load round trip reproduces the stored basis exactly.
  Eigen::MatrixXd gram = rows * rows.transpose();
  gram.diagonal().array() -= 1.0;
  if (gram.lpNorm<Eigen::Infinity>() <= 1e-12) {
    W.basis = rows;
    W.validate();
    return W;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeThinV);
  const double cutoff = 1e-10 * std::max(svd.singularValues()[0], 1.0);
  int rank = 0;
  while (rank < svd.singularValues().size() &&
         svd.singularValues()[rank] > cutoff) {
    ++rank;
  }
  W.basis = svd.matrixV().leftCols(rank).transpose();
  W.validate();
  return W;
}

Subspace Subspace::full(int m, int ell) {
  // Helmert rows give an orthonormal basis of the mean-zero hyperplane;
  // tensoring with coordinate vectors keeps orthonormality.
  Eigen::MatrixXd rows((int64_t(m) - 1) * ell, int64_t(m) * ell);
  rows.setZero();
  int r = 0;
  for (int i = 1; i < m; ++i) {
    const double scale = 1.0 / std::sqrt(double(i) * (i + 1));
    for (int c = 0; c < ell; ++c) {
      for (int j = 0; j < i; ++j) rows(r, int64_t(j) * ell + c) = scale;
      rows(r, int64_t(i) * ell + c) = -double(i) * scale;
      ++r;
    }
  }
  Subspace W;
  W.m = m;
  W.ell = ell;
  W.basis = rows;
  W.validate();
  return W;
}

Eigen::MatrixXd admissible_directions(const Subspace& W,
                                      const Eigen::VectorXd& v, double tol) {
  require(v.size() == W.m, "admissible_directions: profile has wrong length");
  const double nv = v.norm();
  if (nv == 0.0) return Eigen::MatrixXd::Identity(W.ell, W.ell);
  Eigen::MatrixXd M(W.ambient_dim(), W.ell);
  Eigen::VectorXd col(W.ambient_dim());
  for (int c = 0; c < W.ell; ++c) {
    col.setZero();
    for (int j = 0; j < W.m; ++j) col[int64_t(j) * W.ell + c] = v[j];
    M.col(c) = col - W.project(col);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinV);
  const double cutoff = tol * std::max(nv, 1.0);
  int keep = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] <= cutoff) ++keep;
  }
  return svd.matrixV().rightCols(keep);
}

std::vector<ExtremalClass> extremal_vectors(const Subspace& W, double alpha,
                                            double tol) {
  W.validate();
  require(alpha > 0.0 && alpha <= 1.0,
          "extremal_vectors: order must be in (0,1]");
  require(W.m <= 16, "extremal_vectors: subset enumeration capped at m = 16");
  const int m = W.m;
  const double h_real = std::pow(double(m), 1.0 - alpha);
  const int h = int(std::lround(h_real));
  require(std::abs(h_real - h) <= 1e-6 * h_real && h >= 1 && h <= m,
          "extremal_vectors: m^(1-alpha) must be a positive integer");
  const double top = std::pow(double(m), alpha) - 1.0;

  std::vector<ExtremalClass> classes;
  // Ascending bitmask order makes the class list lexicographic by support.
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    if (__builtin_popcount(mask) != h) continue;
    ExtremalClass cls;
    cls.v.resize(m);
    for (int j = 0; j < m; ++j) {
      const bool in = (mask >> j) & 1u;
      cls.v[j] = in ? top : -1.0;
      if (in) cls.support.push_back(j);
    }
    cls.directions = admissible_directions(W, cls.v, tol);
    if (cls.directions.cols() > 0) classes.push_back(std::move(cls));
  }
  return classes;
}

NonLocalityReport is_nonlocal(const Subspace& W, double alpha, double tol) {
  NonLocalityReport rep;
  rep.classes = extremal_vectors(W, alpha, tol);
  if (rep.classes.empty()) {
    rep.nonlocal = true;
    rep.vacuous = true;
    return rep;
  }
  const int k = W.dim();
  const int ell = W.ell;
  rep.nonlocal = true;
  for (const ExtremalClass& cls : rep.classes) {
    // Solution space of b + w_j = 0 off the support, over pairs
    // (w, b) = (basis^T u, b); one scalar constraint per off-support
    // coordinate and component.
    const int off = W.m - int(cls.support.size());
    Eigen::MatrixXd C(int64_t(off) * ell, k + ell);
    C.setZero();
    int row = 0;
    std::vector<bool> in_support(W.m, false);
    for (int j : cls.support) in_support[j] = true;
    for (int j = 0; j < W.m; ++j) {
      if (in_support[j]) continue;
      for (int c = 0; c < ell; ++c) {
        C.block(row, 0, 1, k) = W.basis.col(int64_t(j) * ell + c).transpose();
        C(row, k + c) = 1.0;
        ++row;
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
    const double cutoff = 1e-9 * std::max(svd.singularValues()[0], 1.0);
    int rank = 0;
    while (rank < svd.singularValues().size() &&
           svd.singularValues()[rank] > cutoff) {
      ++rank;
    }
    const int sol_dim = k + ell - rank;
    const int dir_dim = int(cls.directions.cols());
    rep.solution_dims.push_back(sol_dim);
    rep.expected_dims.push_back(dir_dim);
    const int line_dim = W.complexified ? 2 : 1;
    if (sol_dim != dir_dim || dir_dim != line_dim) rep.nonlocal = false;
  }
  return rep;
}

double flatness_measure(const Eigen::MatrixXd& x) {
  require(x.rows() >= 1 && x.cols() >= 1, "empty difference");
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const double nm = mean.norm();
  if (nm == 0.0) return std::numeric_limits<double>::infinity();
  return x.rowwise().norm().mean() / nm - 1.0;
}

RankOneFit nearest_rank_one(const Eigen::MatrixXd& x, const Subspace& W,
                            double alpha) {
  require(x.rows() == W.m && x.cols() == W.ell, "difference shape mismatch");
  const auto classes = extremal_vectors(W, alpha);
  require(!classes.empty(), "no extremal classes at this order");
  const int m = W.m;
  RankOneFit best;
  best.distance = std::numeric_limits<double>::infinity();
  for (size_t ci = 0; ci < classes.size(); ++ci) {
    const ExtremalClass& cls = classes[ci];
    const Eigen::MatrixXd& D = cls.directions;
    // 1 + v_j vanishes off the support and is constant on it, so the
    // objective splits into fixed off-support norms plus a geometric median
    // problem for z = m^alpha a' restricted to the direction span.
    double off = 0.0;
    std::vector<char> on(size_t(m), 0);
    for (int j : cls.support) on[size_t(j)] = 1;
    std::vector<Eigen::VectorXd> pts;
    for (int j = 0; j < m; ++j) {
      if (on[size_t(j)])
        pts.push_back(x.row(j).transpose());
      else
        off += x.row(j).norm();
    }
    auto objective = [&](const Eigen::VectorXd& z) {
      double s = off;
      for (const auto& p : pts) s += (p - z).norm();
      return s;
    };
    auto project = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
      return D * (D.transpose() * z);
    };
    Eigen::VectorXd z = Eigen::VectorXd::Zero(W.ell);
    for (const auto& p : pts) z += p;
    z = project(z / double(pts.size()));
    double val = objective(z);
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd num = Eigen::VectorXd::Zero(W.ell);
      double den = 0.0;
      for (const auto& p : pts) {
        double w = std::max((p - z).norm(), 1e-15);
        num += p / w;
        den += 1.0 / w;
      }
      Eigen::VectorXd zn = project(num / den);
      double vn = objective(zn);
      if (vn > val - 1e-15 * std::max(val, 1.0)) break;
      z = zn;
      val = vn;
    }
    if (val < best.distance) {
      best.distance = val;
      best.class_index = int(ci);
      // (1 + v_j) a' equals z on the support and vanishes off it.
      best.nearest = Eigen::MatrixXd::Zero(m, W.ell);
      for (int j : cls.support) best.nearest.row(j) = z.transpose();
    }
  }
  return best;
}

}  // namespace tracelab
