#include "tracelab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace tracelab {

ExtremalInstance extremal_martingale(const Subspace& W,
                                     const ExtremalClass& cls,
                                     const Eigen::VectorXd& a, double alpha,
                                     int N) {
  require(a.size() == W.ell, "direction has wrong dimension");
  require(N >= 1, "depth must be positive");
  const int m = W.m;
  Eigen::MatrixXd prof = cls.v * a.transpose();
  require(W.contains(tensor_vec(prof)), "profile is not extremal for this space");
  TreeShape shape{m, N, W.ell};
  shape.validate();
  std::vector<char> in_support(size_t(m), 0);
  for (int j : cls.support) in_support[size_t(j)] = 1;

  const int64_t leaves = shape.leaf_count();
  const double top = std::pow(double(m), alpha * double(N));
  const double leaf_mass = std::pow(double(m), (alpha - 1.0) * double(N));
  SimpleMartingale F;
  F.shape = shape;
  F.leaves = Eigen::MatrixXd::Zero(leaves, W.ell);
  TreeMeasure nu;
  nu.m = m;
  nu.depth = N;
  nu.leaf_mass = Eigen::VectorXd::Zero(leaves);
  for (int64_t i = 0; i < leaves; ++i) {
    int64_t v = i;
    bool alive = true;
    for (int n = 0; n < N; ++n) {
      if (!in_support[size_t(v % m)]) {
        alive = false;
        break;
      }
      v /= m;
    }
    if (alive) {
      F.leaves.row(i) = top * a.transpose();
      nu.leaf_mass[i] = leaf_mass;
    }
  }
  F.validate();
  nu.validate();
  return {std::move(F), std::move(nu)};
}

double mean_abs_sum(const Eigen::VectorXd& xi, int N) {
  const int h = int(xi.size());
  require(h >= 1, "profile must be nonempty");
  require(N >= 1, "draw count must be positive");
  std::vector<double> lg(size_t(N) + 2);
  for (int i = 0; i <= N + 1; ++i) lg[size_t(i)] = std::lgamma(double(i) + 1.0);
  const double logh = std::log(double(h));
  double total = 0.0;
  // Odometer over compositions (k_1, ..., k_h) of N.
  std::vector<int> k(size_t(h), 0);
  auto weight_sum = [&]() {
    double lw = lg[size_t(N)] - double(N) * logh;
    double s = 0.0;
    for (int i = 0; i < h; ++i) {
      lw -= lg[size_t(k[size_t(i)])];
      s += double(k[size_t(i)]) * xi[i];
    }
    total += std::exp(lw) * std::abs(s);
  };
  std::function<void(int, int)> rec = [&](int pos, int rest) {
    if (pos == h - 1) {
      k[size_t(pos)] = rest;
      weight_sum();
      return;
    }
    for (int c = 0; c <= rest; ++c) {
      k[size_t(pos)] = c;
      rec(pos + 1, rest - c);
    }
  };
  rec(0, N);
  return total;
}

double mean_abs_sum_enumerated(const Eigen::VectorXd& xi, int N) {
  const int h = int(xi.size());
  require(h >= 1, "profile must be nonempty");
  require(N >= 1, "draw count must be positive");
  double terms = std::pow(double(h), double(N));
  require(terms <= 2e6, "enumeration too large");
  int64_t count = int64_t(llround(terms));
  double total = 0.0;
  for (int64_t it = 0; it < count; ++it) {
    int64_t v = it;
    double s = 0.0;
    for (int n = 0; n < N; ++n) {
      s += xi[v % h];
      v /= h;
    }
    total += std::abs(s);
  }
  return total / double(count);
}

BlowupReport blowup_probe(const Subspace& W, const TransformOp& phi,
                          double alpha, const std::vector<int>& Ns,
                          int class_index, int dir_index) {
  auto classes = extremal_vectors(W, alpha);
  require(!classes.empty(), "no extremal vectors at this order");
  require(class_index >= 0 && class_index < int(classes.size()),
          "class index out of range");
  const ExtremalClass& cls = classes[size_t(class_index)];
  require(dir_index >= 0 && dir_index < int(cls.directions.cols()),
          "direction index out of range");
  Eigen::VectorXd a = cls.directions.col(dir_index);

  // Profile of the transform on the support; the blow-up reduces the
  // integral to i.i.d. digit draws with these values.
  Eigen::VectorXd full = phi.apply_vec(tensor_vec(cls.v * a.transpose()));
  const int h = int(cls.support.size());
  Eigen::VectorXd xi(h);
  for (int i = 0; i < h; ++i) xi[i] = full[cls.support[size_t(i)]];

  BlowupReport rep;
  rep.xi = xi;
  rep.xi_mean = xi.mean();
  rep.Ns = Ns;
  // ||F^N||_1 = |a| = 1 for a unit direction, so the ratio is E|sum of xi|.
  for (int N : Ns) {
    require(N >= 1, "depth must be positive");
    rep.ratios.push_back(mean_abs_sum(xi, N) / a.norm());
  }

  double scale = std::max(phi.op_norm(), 1.0);
  rep.all_zero = true;
  for (double r : rep.ratios)
    if (r > 1e-10 * scale) rep.all_zero = false;
  if (rep.all_zero || Ns.size() < 2) {
    rep.slope = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < Ns.size(); ++i) {
    if (rep.ratios[i] <= 0.0) continue;
    double lx = std::log(double(Ns[i])), ly = std::log(rep.ratios[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) {
    rep.slope = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  rep.slope = (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
  return rep;
}

TransformOp mean_zero_witness(const Subspace& W, const ExtremalClass& cls,
                              int dir_index, uint64_t seed) {
  require(dir_index >= 0 && dir_index < int(cls.directions.cols()),
          "direction index out of range");
  const int m = W.m;
  const int h = int(cls.support.size());
  require(h >= 2 && h < m, "support size leaves no room for the correction");
  Eigen::VectorXd a = cls.directions.col(dir_index);
  Eigen::VectorXd w = tensor_vec(cls.v * a.transpose());
  const double wn2 = w.squaredNorm();
  for (int attempt = 0; attempt < 16; ++attempt) {
    TransformOp raw = random_transform(W, seed + uint64_t(attempt));
    Eigen::VectorXd u = raw.A * w;
    double mean_h = 0.0;
    for (int j : cls.support) mean_h += u[j];
    mean_h /= double(h);
    // Correction column: subtracting it zeroes the support mean of the
    // profile while keeping every output mean-zero.
    Eigen::VectorXd c =
        Eigen::VectorXd::Constant(m, -mean_h * double(h) / double(m - h));
    for (int j : cls.support) c[j] = mean_h;
    TransformOp out = raw;
    out.A -= c * (w.transpose() / wn2);
    out.validate();
    Eigen::VectorXd prof = out.A * w;
    double spread = 0.0;
    for (int j : cls.support) spread = std::max(spread, std::abs(prof[j]));
    if (spread > 1e-6 * std::max(out.op_norm(), 1e-12)) return out;
  }
  throw Error("could not build a non-degenerate zero-mean witness");
}

NecessityReport frostman_necessity_probe(const Subspace& W,
                                         const TransformOp& phi, double alpha,
                                         const TreeMeasure& nu) {
  nu.validate();
  require(phi.m == W.m && phi.ell == W.ell, "transform does not match space");
  require(nu.m == W.m, "measure branching factor mismatch");
  require(nu.depth >= 1, "measure needs at least one level");
  require(alpha > 0.0 && alpha < 1.0, "order must lie in (0,1)");
  const int m = W.m;
  NecessityReport rep;

  // Non-degeneracy: every output coordinate must be reachable.
  Eigen::VectorXd best_per_coord = Eigen::VectorXd::Zero(m);
  for (int r = 0; r < W.dim(); ++r) {
    Eigen::VectorXd v = W.basis.row(r).transpose();
    Eigen::MatrixXd rows = tensor_unvec(v, m, W.ell);
    double denom = rows.rowwise().norm().sum();
    if (denom <= 0.0) continue;
    Eigen::VectorXd out = phi.apply_vec(v);
    for (int j = 0; j < m; ++j)
      best_per_coord[j] = std::max(best_per_coord[j], std::abs(out[j]) / denom);
  }
  rep.c_phi = best_per_coord.minCoeff();
  if (rep.c_phi <= 1e-12) {
    rep.applicable = false;
    return rep;
  }

  // Atom (level < depth) with the largest Frostman factor.
  std::vector<Eigen::VectorXd> mass(size_t(nu.depth) + 1);
  mass[size_t(nu.depth)] = nu.leaf_mass;
  for (int n = nu.depth - 1; n >= 0; --n) {
    Eigen::VectorXd up(ipow(m, n));
    for (int64_t i = 0; i < up.size(); ++i)
      up[i] = mass[size_t(n) + 1].segment(i * m, m).sum();
    mass[size_t(n)] = up;
  }
  for (int n = 0; n < nu.depth; ++n) {
    double scale = std::pow(double(m), (1.0 - alpha) * double(n));
    for (int64_t i = 0; i < mass[size_t(n)].size(); ++i) {
      double lam = scale * mass[size_t(n)][i];
      if (lam > rep.lambda) {
        rep.lambda = lam;
        rep.level = n;
        rep.atom = i;
      }
    }
  }
  if (rep.lambda <= 0.0) {
    rep.applicable = false;
    return rep;
  }

  // Heaviest kid of the chosen atom.
  int jstar = 0;
  double kid_best = -1.0;
  for (int j = 0; j < m; ++j) {
    double km = mass[size_t(rep.level) + 1][rep.atom * m + j];
    if (km > kid_best) {
      kid_best = km;
      jstar = j;
    }
  }
  // Increment maximizing the transform response at that kid.
  double c_dir = 0.0;
  Eigen::VectorXd w;
  for (int r = 0; r < W.dim(); ++r) {
    Eigen::VectorXd v = W.basis.row(r).transpose();
    double denom = tensor_unvec(v, m, W.ell).rowwise().norm().sum();
    if (denom <= 0.0) continue;
    double val = std::abs(phi.apply_vec(v)[jstar]) / denom;
    if (val > c_dir) {
      c_dir = val;
      w = v;
    }
  }
  require(c_dir > 0.0, "transform response vanished unexpectedly");

  // Elementary martingale: single increment w at the chosen atom.  The
  // trace ratio evaluates in closed form.
  const int n0 = rep.level;
  Eigen::MatrixXd rows = tensor_unvec(w, m, W.ell);
  double sum_w = rows.rowwise().norm().sum();
  double l1 = std::pow(double(m), -double(n0 + 1)) * sum_w;
  Eigen::VectorXd response = phi.apply_vec(w);
  double integral = 0.0;
  for (int j = 0; j < m; ++j)
    integral += std::abs(response[j]) * mass[size_t(n0) + 1][rep.atom * m + j];
  integral *= std::pow(double(m), -alpha * double(n0));
  rep.ratio = integral / l1;
  rep.bound = rep.lambda * c_dir;
  rep.ok = rep.ratio >= rep.bound * (1.0 - 1e-12);
  return rep;
}

SimpleMartingale random_sobolev_martingale(const Subspace& W, int depth,
                                           double decay, Rng& rng) {
  require(depth >= 0, "depth must be nonnegative");
  require(decay > 0.0, "decay must be positive");
  TreeShape shape{W.m, depth, W.ell};
  shape.validate();
  const int m = W.m;
  Eigen::MatrixXd level(1, W.ell);
  for (int c = 0; c < W.ell; ++c) level(0, c) = rng.normal();
  for (int n = 0; n < depth; ++n) {
    Eigen::MatrixXd next(level.rows() * m, W.ell);
    double scale = std::pow(decay, double(n));
    for (int64_t i = 0; i < level.rows(); ++i) {
      Eigen::VectorXd coeff(W.dim());
      for (int r = 0; r < W.dim(); ++r) coeff[r] = rng.normal();
      Eigen::VectorXd d = W.basis.transpose() * coeff;
      double dn = d.norm();
      if (dn > 0.0) d *= rng.uniform() * scale / dn;
      Eigen::MatrixXd diff = tensor_unvec(d, m, W.ell);
      next.middleRows(i * m, m) = diff.rowwise() + level.row(i);
    }
    level = std::move(next);
  }
  SimpleMartingale F;
  F.shape = shape;
  F.leaves = std::move(level);
  F.validate();
  return F;
}

TraceStats empirical_trace_constant(const Subspace& W, const TransformOp& phi,
                                    const Candidate& G, double alpha,
                                    int depth, int trials, uint64_t seed) {
  require(trials >= 1, "need at least one trial");
  TraceStats stats;
  stats.trials = trials;
  for (int t = 0; t < trials; ++t) {
    Rng rng(substream_seed(seed, uint64_t(t)));
    SimpleMartingale F = random_sobolev_martingale(W, depth, 0.5, rng);
    TreeMeasure nu = random_frostman_measure(W.m, depth, alpha,
                                             substream_seed(seed, 1u << 20) + t);
    TraceBoundReport tb =
        trace_bound_from_supersolution(G, F, nu, phi, alpha, 0.0, W);
    double l1 = std::max(F.l1_norm(), 1e-300);
    stats.max_ratio = std::max(stats.max_ratio, tb.lhs / l1);
    stats.certified_constant = std::max(stats.certified_constant, tb.rhs / l1);
    if (!tb.ok) ++stats.violations;
  }
  return stats;
}

}  // namespace tracelab
