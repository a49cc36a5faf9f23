#include "tracelab/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

namespace tracelab {

namespace {

double clamp0(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

double ConfigPoint::s() const {
  return std::max(t(), std::pow(double(m), 1.0 - alpha) * ss.maxCoeff());
}

Eigen::MatrixXd ConfigPoint::diff() const {
  return xs.rowwise() - x();
}

void ConfigPoint::validate(const Subspace& W, double tol) const {
  require(m == W.m && ell == W.ell, "configuration does not match the subspace");
  require(alpha > 0.0 && alpha < 1.0, "order must lie in (0,1)");
  require(xs.rows() == m && xs.cols() == ell, "kid value shape mismatch");
  require(zs.size() == m && ts.size() == m && ss.size() == m,
          "scalar tuple length mismatch");
  require(xs.allFinite() && std::isfinite(y) && zs.allFinite() &&
              ts.allFinite() && ss.allFinite(),
          "configuration entries must be finite");
  for (int j = 0; j < m; ++j) {
    double nx = xs.row(j).norm();
    require(zs[j] >= nx - tol * (1.0 + nx), "kid bound below kid value");
    require(ts[j] >= 0.0 && ss[j] >= 0.0, "masses must be nonnegative");
    require(ts[j] <= ss[j] + tol * (1.0 + ss[j]), "kid mass above kid sup");
  }
  Eigen::VectorXd d = tensor_vec(diff());
  require(W.contains(d, tol), "kid differences leave the subspace");
}

Candidate Candidate::z_slack() {
  Candidate c;
  c.cslack = 1.0;
  return c;
}

Candidate Candidate::subcritical(double theta, double M1, double M2) {
  require(theta > 0.0 && theta < 1.0, "exponent must lie in (0,1)");
  Candidate c;
  c.cy = 1.0;
  c.cpow = M1;
  c.theta = theta;
  c.cslack = M2;
  return c;
}

Candidate Candidate::endpoint(double C1, double C2, double C3) {
  Candidate c;
  c.cy = 1.0;
  c.clin = C1;
  c.csqrt = C2;
  c.cslack = C3;
  return c;
}

double Candidate::evaluate(double absx, double y, double z, double t,
                           double s) const {
  double g = 0.0;
  if (cy != 0.0) g += cy * std::abs(y) * t;
  if (clin != 0.0) g += clin * absx * t;
  if (csqrt != 0.0) g += csqrt * absx * std::sqrt(s * t);
  if (cpow != 0.0)
    g += cpow * absx * std::pow(t, 1.0 - theta) * std::pow(s, theta);
  if (cslack != 0.0) g += cslack * (z - absx) * s;
  if (cxs != 0.0) g += cxs * absx * s;
  return g;
}

std::string Candidate::describe() const {
  std::string out = "G =";
  auto term = [&out](double c, const std::string& name) {
    if (c == 0.0) return;
    out += " + " + std::to_string(c) + "*" + name;
  };
  term(cy, "|y|t");
  term(clin, "|x|t");
  term(csqrt, "|x|sqrt(st)");
  term(cpow, "|x|t^(1-" + std::to_string(theta) + ")s^" + std::to_string(theta));
  term(cslack, "(z-|x|)s");
  term(cxs, "|x|s");
  return out;
}

namespace {

// Shared evaluator.  The direct form mirrors the definition; the stable
// form regroups so every large-coefficient term is a product of clamped
// nonnegative factors.  Both agree in exact arithmetic.
double discrepancy_core(const Candidate& G, const TransformOp& phi,
                        double alpha, const ConfigPoint& c,
                        const Eigen::MatrixXd& diff, bool stable) {
  const int m = c.m;
  const double ma = std::pow(double(m), -alpha);
  const Eigen::VectorXd phiv = phi.apply_diff(diff);
  const Eigen::RowVectorXd xbar = c.x();
  const double absx = xbar.norm();
  const double t = c.t();
  const double s = c.s();

  if (!stable) {
    double parent = G.evaluate(absx, c.y, c.z(), t, s);
    double kids = 0.0;
    const double mal = std::pow(double(m), alpha);
    for (int j = 0; j < m; ++j)
      kids += G.evaluate(c.xs.row(j).norm(), mal * c.y + phiv[j], c.zs[j],
                         c.ts[j], c.ss[j]);
    return parent - ma * kids;
  }

  Eigen::VectorXd nx(m);
  for (int j = 0; j < m; ++j) nx[j] = c.xs.row(j).norm();
  const double u = std::max(std::pow(double(m), alpha - 1.0) * t,
                            c.ss.maxCoeff());
  const double su = std::pow(double(m), 1.0 - alpha) * u;
  double total = 0.0;
  if (G.cslack != 0.0) {
    double term = clamp0(nx.mean() - absx) * su;
    for (int j = 0; j < m; ++j)
      term += ma * clamp0(c.zs[j] - nx[j]) * clamp0(u - c.ss[j]);
    total += G.cslack * term;
  }
  if (G.cy != 0.0) {
    double term = 0.0;
    const double ay = std::abs(c.y);
    for (int j = 0; j < m; ++j)
      term += (ay - std::abs(c.y + ma * phiv[j])) * c.ts[j];
    total += G.cy * term;
  }
  if (G.clin != 0.0) {
    double kids = 0.0;
    for (int j = 0; j < m; ++j) kids += nx[j] * c.ts[j];
    total += G.clin * (absx * t - ma * kids);
  }
  if (G.csqrt != 0.0) {
    double kids = 0.0;
    for (int j = 0; j < m; ++j) kids += nx[j] * std::sqrt(c.ss[j] * c.ts[j]);
    total += G.csqrt * (absx * std::sqrt(su * t) - ma * kids);
  }
  if (G.cpow != 0.0) {
    double kids = 0.0;
    for (int j = 0; j < m; ++j)
      kids += nx[j] * std::pow(c.ts[j], 1.0 - G.theta) *
              std::pow(c.ss[j], G.theta);
    total += G.cpow * (absx * std::pow(t, 1.0 - G.theta) *
                           std::pow(su, G.theta) -
                       ma * kids);
  }
  if (G.cxs != 0.0) {
    double kids = 0.0;
    for (int j = 0; j < m; ++j) kids += nx[j] * c.ss[j];
    total += G.cxs * (absx * su - ma * kids);
  }
  return total;
}

}  // namespace

double discrepancy(const Candidate& G, const Subspace& W,
                   const TransformOp& phi, double alpha,
                   const ConfigPoint& c) {
  c.validate(W);
  require(std::abs(c.alpha - alpha) <= 1e-12, "order mismatch");
  require(phi.m == c.m && phi.ell == c.ell, "transform shape mismatch");
  return discrepancy_core(G, phi, alpha, c, c.diff(), false);
}

double discrepancy_stable(const Candidate& G, const Subspace& W,
                          const TransformOp& phi, double alpha,
                          const ConfigPoint& c) {
  c.validate(W);
  require(std::abs(c.alpha - alpha) <= 1e-12, "order mismatch");
  require(phi.m == c.m && phi.ell == c.ell, "transform shape mismatch");
  return discrepancy_core(G, phi, alpha, c, c.diff(), true);
}

BoundaryReport check_boundary(const Candidate& G, uint64_t seed) {
  Rng rng(seed);
  BoundaryReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  auto probe = [&](double absx, double y, double t, double s) {
    double gap = G.evaluate(absx, y, absx, t, s) - std::abs(y) * t;
    if (gap < rep.min_gap) {
      rep.min_gap = gap;
      rep.witness_absx = absx;
      rep.witness_y = y;
      rep.witness_t = t;
      rep.witness_s = s;
    }
  };
  probe(0.0, 1.0, 1.0, 1.0);
  probe(1.0, 0.0, 0.0, 1.0);
  probe(1.0, -1.0, 1.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    double absx = std::abs(rng.normal());
    double y = 2.0 * rng.normal();
    double t = rng.uniform();
    probe(absx, y, t, 1.0);
  }
  rep.ok = rep.min_gap >= -1e-12;
  return rep;
}

AboveReport check_estimate_from_above(const Candidate& G, uint64_t seed) {
  Rng rng(seed);
  AboveReport rep;
  auto probe = [&](double absx, double z, double t) {
    if (z <= 1e-12) return;
    rep.constant = std::max(rep.constant, G.evaluate(absx, 0.0, z, t, 1.0) / z);
  };
  probe(1.0, 1.0, 1.0);
  probe(0.0, 1.0, 1.0);
  probe(1.0, 1.0, 0.0);
  for (int i = 0; i < 100000; ++i) {
    double z = std::abs(rng.normal()) + 1e-6;
    double absx = rng.uniform() * z;
    double t = rng.uniform();
    probe(absx, z, t);
  }
  rep.bounded = std::isfinite(rep.constant);
  return rep;
}

namespace {

// Parameter vector layout: k difference coefficients, ell parent values,
// y, then m slack, m fraction, m sup entries.  The builder is the single
// mapping from parameters to valid normalized configurations; sampling and
// descent both go through it.
struct Builder {
  const Subspace* W;
  double alpha;
  int m, ell, k, P;

  Builder(const Subspace& W_, double a)
      : W(&W_), alpha(a), m(W_.m), ell(W_.ell), k(W_.dim()),
        P(W_.dim() + W_.ell + 1 + 3 * W_.m) {}

  bool build(const Eigen::VectorXd& p, ConfigPoint& out) const {
    out.m = m;
    out.ell = ell;
    out.alpha = alpha;
    Eigen::VectorXd dvec = W->basis.transpose() * p.head(k);
    Eigen::MatrixXd diff = tensor_unvec(dvec, m, ell);
    Eigen::RowVectorXd x = p.segment(k, ell).transpose();
    double y = p[k + ell];
    Eigen::MatrixXd xs = diff.rowwise() + x;
    Eigen::VectorXd nx(m), sl(m), fr(m), sr(m);
    for (int j = 0; j < m; ++j) {
      nx[j] = xs.row(j).norm();
      sl[j] = std::abs(p[k + ell + 1 + j]);
      fr[j] = std::min(std::abs(p[k + ell + 1 + m + j]), 1.0);
      sr[j] = std::abs(p[k + ell + 1 + 2 * m + j]);
    }
    double spatial = x.norm() + std::abs(y) + (nx + sl).sum();
    Eigen::VectorXd ts = fr.cwiseProduct(sr);
    double t = ts.sum();
    double s = std::max(t, std::pow(double(m), 1.0 - alpha) * sr.maxCoeff());
    if (!(spatial > 1e-12) || !(s > 1e-12)) return false;
    if (!std::isfinite(spatial) || !std::isfinite(s)) return false;
    out.xs = xs / spatial;
    out.y = y / spatial;
    out.zs.resize(m);
    for (int j = 0; j < m; ++j)
      out.zs[j] = std::max((nx[j] + sl[j]) / spatial, out.xs.row(j).norm());
    out.ts = ts / s;
    out.ss = sr / s;
    return true;
  }
};

Eigen::VectorXd draw_params(const Builder& B, Rng& rng) {
  Eigen::VectorXd p(B.P);
  for (int i = 0; i < B.k; ++i) p[i] = rng.normal();
  for (int i = 0; i < B.ell; ++i) p[B.k + i] = rng.normal();
  p[B.k + B.ell] = 2.0 * rng.normal();
  for (int j = 0; j < B.m; ++j) {
    double u = rng.uniform();
    p[B.k + B.ell + 1 + j] = u < 0.3 ? 0.0 : rng.normal();
  }
  for (int j = 0; j < B.m; ++j) {
    double u = rng.uniform();
    p[B.k + B.ell + 1 + B.m + j] = u > 0.7 ? 1.0 : u / 0.7;
  }
  for (int j = 0; j < B.m; ++j) {
    double u = rng.uniform();
    p[B.k + B.ell + 1 + 2 * B.m + j] = u < 0.1 ? 0.0 : rng.normal();
  }
  return p;
}

// Parameter vector of the exact two-valued split: kid differences v (x) a,
// parent a, boundary bounds, masses chi_H / |H| with sups equal to masses.
Eigen::VectorXd profile_params(const Builder& B, const Eigen::VectorXd& v,
                               const Eigen::VectorXd& a, double y) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(B.P);
  Eigen::MatrixXd prof = v * a.transpose();  // m x ell rank-one difference
  p.head(B.k) = B.W->basis * tensor_vec(prof);
  p.segment(B.k, B.ell) = a;
  p[B.k + B.ell] = y;
  int h = 0;
  for (int j = 0; j < B.m; ++j)
    if (v[j] > -0.5) ++h;
  for (int j = 0; j < B.m; ++j) {
    p[B.k + B.ell + 1 + B.m + j] = 1.0;  // t_j = s_j
    p[B.k + B.ell + 1 + 2 * B.m + j] = v[j] > -0.5 ? 1.0 / double(h) : 0.0;
  }
  return p;
}

// Deterministic structured strata: exact and perturbed extremal splits (or
// near-extremal two-valued stress profiles when the order admits none),
// equal splits, boundary configurations, and extreme-y configurations.
std::vector<Eigen::VectorXd> structured_params(const Builder& B,
                                               uint64_t seed) {
  const Subspace& W = *B.W;
  const double alpha = B.alpha;
  const int m = B.m;
  Rng rng(substream_seed(seed, 0x7fffffffffffff00ull));
  std::vector<Eigen::VectorXd> out;

  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> profiles;  // (v, a)
  double h_real = std::pow(double(m), 1.0 - alpha);
  bool integral = std::abs(h_real - std::lround(h_real)) <= 1e-6 * h_real &&
                  std::lround(h_real) >= 1 && std::lround(h_real) < m;
  if (integral) {
    for (const auto& cls : extremal_vectors(W, alpha)) {
      for (Eigen::Index c = 0; c < cls.directions.cols(); ++c)
        profiles.emplace_back(cls.v, cls.directions.col(c));
      if (cls.directions.cols() >= 2) {
        Eigen::VectorXd mix =
            (cls.directions.col(0) + cls.directions.col(1)).normalized();
        profiles.emplace_back(cls.v, mix);
      }
    }
  } else if (m <= 16) {
    // Stress profiles: two-valued splits at the neighboring integer sizes.
    long h0 = std::lround(h_real);
    for (long h : {h0 - 1, h0, h0 + 1}) {
      if (h < 1 || h >= m) continue;
      for (int mask = 1; mask < (1 << m) && profiles.size() < 64; ++mask) {
        if (__builtin_popcount(unsigned(mask)) != h) continue;
        Eigen::VectorXd v(m);
        for (int j = 0; j < m; ++j)
          v[j] = (mask >> j) & 1 ? double(m) / double(h) - 1.0 : -1.0;
        Eigen::MatrixXd dirs = admissible_directions(W, v);
        for (Eigen::Index c = 0; c < dirs.cols(); ++c)
          profiles.emplace_back(v, dirs.col(c));
      }
    }
  }
  const double ys[] = {0.0, 0.1, -0.1, 10.0, -10.0};
  const double rhos[] = {0.0, 1e-3, 1e-2, 1e-1};
  for (const auto& [v, a] : profiles)
    for (double y : ys)
      for (double rho : rhos) {
        Eigen::VectorXd p = profile_params(B, v, a, y);
        if (rho > 0.0)
          for (int i = 0; i < B.P; ++i) p[i] += rho * rng.normal();
        out.push_back(std::move(p));
      }

  // Equal splits: zero difference, t_j = t/m, s_j = m^(alpha-1) s.
  for (int rep = 0; rep < 4; ++rep) {
    Eigen::VectorXd x(B.ell);
    for (int i = 0; i < B.ell; ++i) x[i] = rng.normal();
    for (double y : {0.0, 1.0, -1.0})
      for (double slack : {0.0, 1.0}) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(B.P);
        p.segment(B.k, B.ell) = x;
        p[B.k + B.ell] = y;
        for (int j = 0; j < m; ++j) {
          p[B.k + B.ell + 1 + j] = slack;
          p[B.k + B.ell + 1 + m + j] = std::pow(double(m), -alpha);
          p[B.k + B.ell + 1 + 2 * m + j] = 1.0;
        }
        out.push_back(std::move(p));
      }
  }

  // Boundary z_j = |x_j| and extreme-y random configurations.
  for (int rep = 0; rep < 32; ++rep) {
    Eigen::VectorXd p = draw_params(B, rng);
    for (int j = 0; j < m; ++j) p[B.k + B.ell + 1 + j] = 0.0;
    out.push_back(std::move(p));
  }
  for (int rep = 0; rep < 16; ++rep) {
    Eigen::VectorXd p = draw_params(B, rng);
    p[B.k + B.ell] = rep % 2 == 0 ? 50.0 : -50.0;
    out.push_back(std::move(p));
  }
  return out;
}

struct Tracker {
  double min_value = std::numeric_limits<double>::infinity();
  int64_t min_index = -1;
  Eigen::VectorXd min_params;

  void offer(double v, int64_t idx, const Eigen::VectorXd& p) {
    if (v < min_value || (v == min_value && idx < min_index)) {
      min_value = v;
      min_index = idx;
      min_params = p;
    }
  }
};

// Bounded pool of the lowest-value parameter vectors; (value, index) keys
// make the retained set independent of insertion order.
struct BestPool {
  size_t cap;
  double threshold = std::numeric_limits<double>::infinity();
  struct Entry {
    double value;
    int64_t index;
    Eigen::VectorXd params;
  };
  std::vector<Entry> entries;

  explicit BestPool(size_t c) : cap(c) {}
  void offer(double v, int64_t idx, const Eigen::VectorXd& p) {
    if (cap == 0 || v >= threshold) return;
    entries.push_back({v, idx, p});
    if (entries.size() > 2 * cap) compact();
  }
  void compact() {
    std::sort(entries.begin(), entries.end(), [](const Entry& a,
                                                 const Entry& b) {
      return a.value != b.value ? a.value < b.value : a.index < b.index;
    });
    if (entries.size() > cap) {
      entries.resize(cap);
      threshold = entries.back().value;
    }
  }
  void merge(BestPool&& other) {
    for (auto& e : other.entries) entries.push_back(std::move(e));
    compact();
  }
};

double pattern_descent(const Builder& B, const Candidate& G,
                       const TransformOp& phi, Eigen::VectorXd& p,
                       double start_value, int eval_budget) {
  double best = start_value;
  double step = 0.02;
  int evals = 0;
  ConfigPoint c;
  auto value_at = [&](const Eigen::VectorXd& q) -> std::optional<double> {
    ++evals;
    if (!B.build(q, c)) return std::nullopt;
    return discrepancy_core(G, phi, B.alpha, c, c.diff(), true);
  };
  while (step > 1e-4 && evals < eval_budget) {
    bool improved = false;
    for (int i = 0; i < B.P && evals < eval_budget; ++i) {
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd q = p;
        q[i] += sgn * step;
        auto v = value_at(q);
        if (v && *v < best - 1e-15) {
          best = *v;
          p = q;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace

ConfigPoint random_config(const Subspace& W, double alpha, Rng& rng) {
  Builder B(W, alpha);
  ConfigPoint c;
  for (int tries = 0; tries < 100; ++tries)
    if (B.build(draw_params(B, rng), c)) return c;
  throw Error("sampler produced no valid points");
}

CertifyReport certify_main_inequality(const Candidate& G, const Subspace& W,
                                      const TransformOp& phi, double alpha,
                                      int64_t sampler_budget, uint64_t seed,
                                      int jobs) {
  require(sampler_budget > 0, "sampler budget must be positive");
  require(alpha > 0.0 && alpha < 1.0, "order must lie in (0,1)");
  require(phi.m == W.m && phi.ell == W.ell, "transform does not match space");
  if (jobs < 1) jobs = 1;
  Builder B(W, alpha);
  CertifyReport rep;
  rep.budget = sampler_budget;
  rep.seed = seed;
  rep.alpha = alpha;
  rep.candidate_desc = G.describe();

  Tracker track;
  size_t pool_cap = size_t(std::clamp<int64_t>(sampler_budget / 100, 1, 20000));
  BestPool pool(pool_cap);
  ConfigPoint c;

  auto strata = structured_params(B, seed);
  int64_t next_index = 0;
  for (const auto& p : strata) {
    int64_t idx = next_index++;
    if (!B.build(p, c)) {
      ++rep.degenerate_count;
      continue;
    }
    double v = discrepancy_core(G, phi, alpha, c, c.diff(), true);
    ++rep.structured_count;
    track.offer(v, idx, p);
    pool.offer(v, idx, p);
  }

  // A structured refutation is conclusive; skip the random phase.
  if (track.min_value < -1e-6) {
    rep.early_refuted = true;
    rep.min_found = track.min_value;
    rep.certified = false;
    if (B.build(track.min_params, c)) rep.witness = c;
    return rep;
  }

  int64_t n_random = std::max<int64_t>(0, sampler_budget - rep.structured_count);
  int64_t base = next_index;
  std::mutex merge_mutex;
  std::vector<int64_t> valid_counts(size_t(jobs), 0),
      degen_counts(size_t(jobs), 0);
  auto worker = [&](int w) {
    Tracker local;
    BestPool lpool(pool_cap);
    ConfigPoint lc;
    int64_t lo = n_random * w / jobs, hi = n_random * (w + 1) / jobs;
    for (int64_t i = lo; i < hi; ++i) {
      Rng rng(substream_seed(seed, uint64_t(i)));
      Eigen::VectorXd p = draw_params(B, rng);
      if (!B.build(p, lc)) {
        ++degen_counts[size_t(w)];
        continue;
      }
      double v = discrepancy_core(G, phi, alpha, lc, lc.diff(), true);
      ++valid_counts[size_t(w)];
      local.offer(v, base + i, p);
      lpool.offer(v, base + i, p);
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    if (local.min_index >= 0)
      track.offer(local.min_value, local.min_index, local.min_params);
    pool.merge(std::move(lpool));
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
    for (auto& th : threads) th.join();
  }
  for (int w = 0; w < jobs; ++w) {
    rep.random_count += valid_counts[size_t(w)];
    rep.degenerate_count += degen_counts[size_t(w)];
  }

  // Descent from the best one percent, deterministic order.
  pool.compact();
  for (auto& e : pool.entries) {
    Eigen::VectorXd p = e.params;
    double v = pattern_descent(B, G, phi, p, e.value, 400);
    ++rep.descent_starts;
    track.offer(v, e.index, p);
  }

  rep.min_found = track.min_value;
  rep.certified = rep.min_found >= -1e-9;
  if (track.min_index >= 0 && B.build(track.min_params, c)) rep.witness = c;
  return rep;
}

SearchReport search_constants(CandidateKind kind, const Subspace& W,
                              const TransformOp& phi, double alpha,
                              int64_t budget, uint64_t seed, int jobs) {
  require(budget > 0, "search budget must be positive");
  std::vector<Candidate> ladder;
  const double bases[] = {10.0, 100.0, 1000.0};
  if (kind == CandidateKind::Endpoint) {
    for (double c1 : bases)
      for (double r2 : bases)
        for (double r3 : bases)
          ladder.push_back(Candidate::endpoint(c1, c1 * r2, c1 * r2 * r3));
  } else {
    for (double th : {0.5, 0.75, 0.9})
      for (double m1 : bases)
        for (double r : bases)
          ladder.push_back(Candidate::subcritical(th, m1, m1 * r));
  }
  SearchReport rep;
  rep.best_min = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < ladder.size(); ++i) {
    CertifyReport cr = certify_main_inequality(
        ladder[i], W, phi, alpha, budget,
        substream_seed(seed, 0x100000ull + i), jobs);
    ++rep.ladders_tried;
    if (cr.min_found > rep.best_min || rep.ladders_tried == 1) {
      rep.best_min = cr.min_found;
      rep.candidate = ladder[i];
      rep.certification = cr;
    }
    if (cr.certified) {
      rep.found = true;
      rep.candidate = ladder[i];
      rep.certification = cr;
      rep.best_min = cr.min_found;
      break;
    }
  }
  return rep;
}

namespace {

// Shared per-level data for the supermartingale process.
struct ProcessData {
  int m = 2, N = 0;
  std::vector<Eigen::MatrixXd> vals;          // F_n values
  std::vector<Eigen::VectorXd> y;             // y0 + accumulated sums
  std::vector<Eigen::VectorXd> z;             // E(|F_N| | level n)
  std::vector<Eigen::VectorXd> mass;          // nu per atom
  std::vector<Eigen::VectorXd> sup;           // relative sup process
  bool telescoping = true;
};

ProcessData build_process(const TransformOp& phi, double alpha,
                          const SimpleMartingale& F, const TreeMeasure& nu,
                          double y0, const Subspace& W) {
  F.validate();
  nu.validate();
  require(F.shape.m == nu.m && F.shape.depth == nu.depth,
          "martingale and measure shapes differ");
  require(F.shape.m == W.m && F.shape.ell == W.ell,
          "martingale does not match the subspace");
  require(phi.m == W.m && phi.ell == W.ell, "transform does not match space");
  require(alpha > 0.0 && alpha < 1.0, "order must lie in (0,1)");
  ProcessData pd;
  pd.m = F.shape.m;
  pd.N = F.shape.depth;
  const int m = pd.m;
  const int N = pd.N;

  pd.vals.resize(size_t(N) + 1);
  for (int n = 0; n <= N; ++n) pd.vals[size_t(n)] = F.level_values(n);

  pd.z.resize(size_t(N) + 1);
  Eigen::VectorXd zl = pd.vals[size_t(N)].rowwise().norm();
  pd.z[size_t(N)] = zl;
  for (int n = N - 1; n >= 0; --n) {
    Eigen::VectorXd up(ipow(m, n));
    for (int64_t i = 0; i < up.size(); ++i)
      up[i] = pd.z[size_t(n) + 1].segment(i * m, m).mean();
    pd.z[size_t(n)] = up;
  }

  pd.mass.resize(size_t(N) + 1);
  pd.mass[size_t(N)] = nu.leaf_mass;
  for (int n = N - 1; n >= 0; --n) {
    Eigen::VectorXd up(ipow(m, n));
    for (int64_t i = 0; i < up.size(); ++i)
      up[i] = pd.mass[size_t(n) + 1].segment(i * m, m).sum();
    pd.mass[size_t(n)] = up;
  }

  MaximalProcess mp = maximal_process(nu, alpha);
  pd.sup.resize(size_t(N) + 1);
  for (int n = 0; n <= N; ++n) pd.sup[size_t(n)] = mp.levels[size_t(n)];

  pd.y.resize(size_t(N) + 1);
  pd.y[0] = Eigen::VectorXd::Constant(1, y0);
  for (int n = 0; n < N; ++n) {
    int64_t parents = ipow(m, n);
    Eigen::VectorXd next(parents * m);
    double w = std::pow(double(m), -alpha * double(n + 1));
    double mal = std::pow(double(m), alpha);
    for (int64_t i = 0; i < parents; ++i) {
      Eigen::MatrixXd diff =
          pd.vals[size_t(n) + 1].middleRows(i * m, m).rowwise() -
          pd.vals[size_t(n)].row(i);
      require(W.contains(tensor_vec(diff)),
              "martingale increments leave the subspace");
      Eigen::VectorXd phiv = phi.apply_diff(diff);
      for (int j = 0; j < m; ++j) {
        next[i * m + j] = pd.y[size_t(n)][i] + w * phiv[j];
        // One-step identity of the rescaled second argument.
        double lhs = std::pow(double(m), alpha * double(n + 1)) *
                     next[i * m + j];
        double rhs = mal * (std::pow(double(m), alpha * double(n)) *
                            pd.y[size_t(n)][i]) +
                     phiv[j];
        if (std::abs(lhs - rhs) > 1e-9 * (1.0 + std::abs(rhs)))
          pd.telescoping = false;
      }
    }
    pd.y[size_t(n) + 1] = std::move(next);
  }
  return pd;
}

double process_value(const Candidate& G, double alpha, const ProcessData& pd,
                     int n, int64_t i) {
  double scale = std::pow(double(pd.m), (1.0 - alpha) * double(n));
  double yarg = std::pow(double(pd.m), alpha * double(n)) * pd.y[size_t(n)][i];
  return scale * G.evaluate(pd.vals[size_t(n)].row(i).norm(), yarg,
                            pd.z[size_t(n)][i], pd.mass[size_t(n)][i],
                            pd.sup[size_t(n)][i]);
}

}  // namespace

SupermartingaleReport supermartingale_trace(const Candidate& G,
                                            const TransformOp& phi,
                                            double alpha,
                                            const SimpleMartingale& F,
                                            const TreeMeasure& nu,
                                            double y0, const Subspace& W) {
  ProcessData pd = build_process(phi, alpha, F, nu, y0, W);
  SupermartingaleReport rep;
  rep.telescoping = pd.telescoping;
  rep.max_step = -std::numeric_limits<double>::infinity();
  const int m = pd.m;
  std::vector<Eigen::VectorXd> H(size_t(pd.N) + 1);
  for (int n = 0; n <= pd.N; ++n) {
    int64_t count = ipow(m, n);
    H[size_t(n)].resize(count);
    for (int64_t i = 0; i < count; ++i)
      H[size_t(n)][i] = process_value(G, alpha, pd, n, i);
    rep.level_expectations.push_back(H[size_t(n)].mean());
  }
  for (int n = 0; n < pd.N; ++n) {
    int64_t parents = ipow(m, n);
    for (int64_t i = 0; i < parents; ++i) {
      double cond = H[size_t(n) + 1].segment(i * m, m).mean();
      double step = cond - H[size_t(n)][i];
      if (step > rep.max_step) {
        rep.max_step = step;
        rep.worst_level = n;
        rep.worst_atom = i;
      }
    }
  }
  rep.supermartingale = rep.max_step <= 1e-10;
  return rep;
}

TraceBoundReport trace_bound_from_supersolution(const Candidate& G,
                                                const SimpleMartingale& F,
                                                const TreeMeasure& nu,
                                                const TransformOp& phi,
                                                double alpha, double y0,
                                                const Subspace& W) {
  ProcessData pd = build_process(phi, alpha, F, nu, y0, W);
  TraceBoundReport rep;
  rep.lhs = pd.y[size_t(pd.N)].cwiseAbs().dot(nu.leaf_mass);
  rep.rhs = process_value(G, alpha, pd, 0, 0);
  rep.ok = rep.lhs <= rep.rhs + 1e-9;
  return rep;
}

NearExtremalReport discrepancy_lower_bound_near_extremal(
    const Subspace& W, const TransformOp& phi, double alpha, double M,
    int64_t samples, double radius, uint64_t seed) {
  NearExtremalReport rep;
  double h_real = std::pow(double(W.m), 1.0 - alpha);
  if (std::abs(h_real - std::lround(h_real)) > 1e-6 * h_real) {
    rep.vacuous = true;
    return rep;
  }
  auto classes = extremal_vectors(W, alpha);
  if (classes.empty()) {
    rep.vacuous = true;
    return rep;
  }
  Candidate G;
  G.csqrt = 1.0;
  G.cslack = M;
  Rng rng(seed);
  rep.min_ratio = std::numeric_limits<double>::infinity();
  const int m = W.m;
  for (int64_t it = 0; it < samples; ++it) {
    const ExtremalClass& cls = classes[size_t(it) % classes.size()];
    Eigen::VectorXd a =
        cls.directions.col((it / int64_t(classes.size())) %
                           cls.directions.cols());
    // Difference v (x) a plus a radius-sized perturbation inside W.
    Eigen::VectorXd noise_coeff(W.dim());
    for (int i = 0; i < W.dim(); ++i) noise_coeff[i] = rng.normal();
    Eigen::VectorXd nvec = W.basis.transpose() * noise_coeff;
    nvec *= (radius * rng.uniform()) / std::max(nvec.norm(), 1e-300);
    Eigen::MatrixXd diff =
        cls.v * a.transpose() + tensor_unvec(nvec, m, W.ell);
    ConfigPoint c;
    c.m = m;
    c.ell = W.ell;
    c.alpha = alpha;
    c.xs = diff.rowwise() + a.transpose();
    c.y = 0.0;
    c.zs.resize(m);
    for (int j = 0; j < m; ++j) c.zs[j] = c.xs.row(j).norm();
    int h = int(cls.support.size());
    c.ts = Eigen::VectorXd::Zero(m);
    for (int j : cls.support) c.ts[j] = 1.0 / double(h);
    c.ss = c.ts;
    double disc = discrepancy_core(G, phi, alpha, c, c.diff(), false);
    RankOneFit fit = nearest_rank_one(c.xs, W, alpha);
    if (fit.distance < 1e-8) {
      ++rep.excluded;
      continue;
    }
    double st = c.s() * c.t();
    double ratio = disc / (fit.distance * std::sqrt(st));
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    ++rep.used;
  }
  return rep;
}

}  // namespace tracelab
