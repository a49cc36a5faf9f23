#pragma once

// Ball-growth (Frostman) condition on tree measures and the maximal process
// driving the supermartingale argument.

#include <Eigen/Dense>

#include <vector>

#include "tracelab/madic.hpp"

namespace tracelab {

// max over all atoms (every level, root included) of m^((1-alpha) level) nu.
double frostman_sup(const TreeMeasure& nu, double alpha);

// Per-atom maximal values in the normalization that satisfies the splitting
// rule exactly: rel(omega) = max(nu(omega), m^(1-alpha) max over kids).
// The absolute normalization m^((1-alpha) n) rel(omega) equals the maximum
// of m^((1-alpha) level(v)) nu(v) over descendants v of omega.
struct MaximalProcess {
  int m = 2;
  int depth = 0;
  double alpha = 0.5;
  std::vector<Eigen::VectorXd> levels;  // levels[n] has m^n entries

  double relative(int n, int64_t index) const;
  double absolute(int n, int64_t index) const;
  // Equals frostman_sup of the source measure.
  double root() const { return levels.front()[0]; }
};

MaximalProcess maximal_process(const TreeMeasure& nu, double alpha);

// Random measure saturating the growth condition: recursive mass splitting
// with kid masses water-filled below the per-level cap m^((alpha-1) n), then
// rescaled so the Frostman supremum lands in [1/2, 1].  Bit-reproducible for
// a fixed seed.
TreeMeasure random_frostman_measure(int m, int depth, double alpha,
                                    uint64_t seed);

}  // namespace tracelab
