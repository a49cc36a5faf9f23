#include "tracelab/frostman.hpp"

#include <cmath>

namespace tracelab {

double frostman_sup(const TreeMeasure& nu, double alpha) {
  nu.validate();
  require(alpha > 0.0 && alpha <= 1.0, "frostman_sup: order must be in (0,1]");
  // Bottom-up pyramid of atom masses, scaled per level.
  Eigen::VectorXd masses = nu.leaf_mass;
  double best = std::pow(double(nu.m), (1.0 - alpha) * nu.depth) *
                (masses.size() ? masses.maxCoeff() : 0.0);
  for (int n = nu.depth - 1; n >= 0; --n) {
    Eigen::VectorXd coarse(masses.size() / nu.m);
    for (int64_t i = 0; i < coarse.size(); ++i) {
      coarse[i] = masses.segment(i * nu.m, nu.m).sum();
    }
    masses = std::move(coarse);
    best = std::max(best,
                    std::pow(double(nu.m), (1.0 - alpha) * n) *
                        masses.maxCoeff());
  }
  return best;
}

double MaximalProcess::relative(int n, int64_t index) const {
  require(n >= 0 && n <= depth, "MaximalProcess: level out of range");
  require(index >= 0 && index < levels[n].size(),
          "MaximalProcess: index out of range");
  return levels[n][index];
}

double MaximalProcess::absolute(int n, int64_t index) const {
  return std::pow(double(m), (1.0 - alpha) * n) * relative(n, index);
}

MaximalProcess maximal_process(const TreeMeasure& nu, double alpha) {
  nu.validate();
  require(alpha > 0.0 && alpha <= 1.0,
          "maximal_process: order must be in (0,1]");
  MaximalProcess mp;
  mp.m = nu.m;
  mp.depth = nu.depth;
  mp.alpha = alpha;
  mp.levels.resize(nu.depth + 1);
  mp.levels[nu.depth] = nu.leaf_mass;
  const double lift = std::pow(double(nu.m), 1.0 - alpha);
  for (int n = nu.depth - 1; n >= 0; --n) {
    const Eigen::VectorXd& fine = mp.levels[n + 1];
    Eigen::VectorXd cur(ipow(nu.m, n));
    for (int64_t i = 0; i < cur.size(); ++i) {
      const double kid_max = fine.segment(i * nu.m, nu.m).maxCoeff();
      cur[i] = std::max(nu.atom_mass(n, i), lift * kid_max);
    }
    mp.levels[n] = std::move(cur);
  }
  return mp;
}

namespace {

// Split `total` into m parts proportional to positive weights, none above
// cap.  Feasible whenever m * cap >= total; the clipped mass is re-spread
// over the unclipped slots (water-filling), which terminates in <= m rounds.
Eigen::VectorXd capped_split(double total, double cap, Rng& rng, int m) {
  Eigen::VectorXd w(m);
  for (int j = 0; j < m; ++j) w[j] = 0.05 + rng.uniform();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  std::vector<bool> clipped(m, false);
  for (int round = 0; round < m; ++round) {
    double free_total = total;
    double free_weight = 0.0;
    for (int j = 0; j < m; ++j) {
      if (clipped[j]) {
        free_total -= cap;
      } else {
        free_weight += w[j];
      }
    }
    bool changed = false;
    for (int j = 0; j < m; ++j) {
      if (clipped[j]) continue;
      const double share = free_total * w[j] / free_weight;
      if (share > cap) {
        clipped[j] = true;
        out[j] = cap;
        changed = true;
      } else {
        out[j] = share;
      }
    }
    if (!changed) break;
  }
  return out;
}

}  // namespace

TreeMeasure random_frostman_measure(int m, int depth, double alpha,
                                    uint64_t seed) {
  require(m >= 2 && depth >= 1, "random_frostman_measure: bad shape");
  require(alpha > 0.0 && alpha <= 1.0,
          "random_frostman_measure: order must be in (0,1]");
  Rng rng(seed);
  Eigen::VectorXd masses(1);
  masses[0] = 1.0;
  for (int n = 0; n < depth; ++n) {
    const double cap = std::pow(double(m), (alpha - 1.0) * (n + 1));
    Eigen::VectorXd next(masses.size() * m);
    for (int64_t p = 0; p < masses.size(); ++p) {
      next.segment(p * m, m) = capped_split(masses[p], cap, rng, m);
    }
    masses = std::move(next);
  }
  TreeMeasure nu;
  nu.m = m;
  nu.depth = depth;
  nu.leaf_mass = masses;
  // Land the supremum at a random point of [1/2, 1]; the condition is
  // 1-homogeneous, so the rescale preserves it.
  const double target = 0.5 + 0.5 * rng.uniform();
  nu.leaf_mass *= target / frostman_sup(nu, alpha);
  return nu;
}

}  // namespace tracelab
