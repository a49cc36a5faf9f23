#pragma once

// End-to-end probes: extremal blow-up martingales with their companion
// measures, exact growth-rate tables for the accumulated transform sums,
// the elementary-martingale necessity probe, and Monte-Carlo trace ratios.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "tracelab/bellman.hpp"
#include "tracelab/frostman.hpp"
#include "tracelab/madic.hpp"
#include "tracelab/subspace.hpp"
#include "tracelab/transform.hpp"

namespace tracelab {

struct ExtremalInstance {
  SimpleMartingale F;
  TreeMeasure companion;
};

// The product martingale of an extremal profile: level-n atoms with all
// digits in the support carry m^(alpha n) a, all others vanish.  The
// companion measure is the normalized scalar product martingale, uniform on
// the surviving leaves; its sup process is identically 1.
ExtremalInstance extremal_martingale(const Subspace& W,
                                     const ExtremalClass& cls,
                                     const Eigen::VectorXd& a, double alpha,
                                     int N);

// Exact E|xi_1 + ... + xi_N| for i.i.d. draws uniform on the entries of xi,
// by dynamic programming over digit-count compositions.
double mean_abs_sum(const Eigen::VectorXd& xi, int N);
// Brute-force enumeration oracle, |xi|^N terms.
double mean_abs_sum_enumerated(const Eigen::VectorXd& xi, int N);

struct BlowupReport {
  std::vector<int> Ns;
  std::vector<double> ratios;
  double slope = 0.0;  // log-log regression; NaN when ratios vanish
  bool all_zero = false;
  Eigen::VectorXd xi;  // transform profile on the support
  double xi_mean = 0.0;
};

// Growth table of |accumulated sums| integrated against the companion
// measure, normalized by the L1 norm of the blow-up martingale.  Computed
// in closed form from the digit model, so N is unrestricted by memory.
BlowupReport blowup_probe(const Subspace& W, const TransformOp& phi,
                          double alpha, const std::vector<int>& Ns,
                          int class_index = 0, int dir_index = 0);

// Non-translation-invariant operator whose profile on the chosen extremal
// support is zero-mean but not identically zero: a random transform minus a
// rank-one correction.  Translation-invariant kernels cannot produce this
// regime because their profile on a coset support is constant.
TransformOp mean_zero_witness(const Subspace& W, const ExtremalClass& cls,
                              int dir_index, uint64_t seed);

struct NecessityReport {
  bool applicable = true;
  double c_phi = 0.0;    // non-degeneracy constant of the transform
  double lambda = 0.0;   // sup of m^((1-alpha)n) nu(atom)
  int level = -1;        // atom attaining it (capped at depth-1)
  int64_t atom = -1;
  double ratio = 0.0;    // trace ratio of the exhibited elementary martingale
  double bound = 0.0;    // lambda * direction constant, proven lower bound
  bool ok = false;       // ratio >= bound up to rounding
};

// Elementary-martingale probe: one increment placed at the atom where the
// measure concentrates most, scaled to show the trace ratio must grow with
// the Frostman violation factor.  Degenerate transforms (an output
// coordinate that vanishes identically) make the probe inapplicable.
NecessityReport frostman_necessity_probe(const Subspace& W,
                                         const TransformOp& phi, double alpha,
                                         const TreeMeasure& nu);

// Random martingale with increments drawn from the unit ball of W and
// geometric scale decay per level.
SimpleMartingale random_sobolev_martingale(const Subspace& W, int depth,
                                           double decay, Rng& rng);

struct TraceStats {
  int trials = 0;
  double max_ratio = 0.0;           // max of lhs / L1 norm
  double certified_constant = 0.0;  // max of rhs / L1 norm
  int violations = 0;               // instances with lhs > rhs + 1e-9
};

// Monte-Carlo lower statistics for the trace inequality on random
// martingale/measure pairs, against the instance-wise supersolution bound.
TraceStats empirical_trace_constant(const Subspace& W, const TransformOp& phi,
                                    const Candidate& G, double alpha,
                                    int depth, int trials, uint64_t seed);

}  // namespace tracelab
