#pragma once

// Fourier analysis on (Z_mu)^d: the discrete transform, the two
// translation-invariant difference spaces (gradient fields and divergence
// free fields), spectral classification, convolution kernels with their
// symbols, and the cancellation conditions.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

#include "tracelab/subspace.hpp"
#include "tracelab/transform.hpp"

namespace tracelab {

// Lexicographic indexing of (Z_mu)^d; the first coordinate is the most
// significant digit, matching the tree leaf order after realification.
struct GroupIndex {
  int mu = 2;
  int d = 1;

  void validate() const;
  int64_t size() const { return ipow(mu, d); }
  std::vector<int> unflatten(int64_t i) const;
  int64_t flatten(const std::vector<int>& x) const;
  int64_t add(int64_t a, int64_t b) const;
  int64_t neg(int64_t a) const;
  // gamma . x mod mu
  int dot(int64_t a, int64_t b) const;
  int64_t unit(int j) const;  // e_j
};

// Functions group -> C^l stored with one row per element, flatten order.
using CFunction = Eigen::MatrixXcd;

// fhat(gamma) = sum_x e^(-2 pi i gamma.x / mu) f(x); naive quadratic sum,
// which doubles as its own oracle.
CFunction dft(const GroupIndex& g, const CFunction& f);
CFunction idft(const GroupIndex& g, const CFunction& fhat);

// Fixed complex/real identification C^l = R^(2l): (Re, Im) interleaved.
Eigen::VectorXd real_identify(const Eigen::VectorXcd& z);
Eigen::VectorXcd complex_identify(const Eigen::VectorXd& x);

enum class SpaceKind { Gradient, Divergence };

// Translation-invariant subspace given by one spectral fiber per frequency.
struct GroupSpace {
  GroupIndex g;
  SpaceKind kind = SpaceKind::Gradient;
  int l = 1;

  int64_t m() const { return g.size(); }
  // l x r orthonormal columns spanning Omega(gamma); r = 0 at gamma = 0.
  Eigen::MatrixXcd fiber(int64_t gamma) const;
  // Real form: ell = 2l, basis rows from e^(2 pi i gamma.x / mu) eta and its
  // i-multiple, exactly orthonormal; complexified flag set.
  Subspace realify() const;
};

// Fibers are the complex lines spanned by (omega^gamma_1 - 1, ...,
// omega^gamma_d - 1); models gradients g_j(x) = f(x + e_j) - f(x).
GroupSpace build_W_grad(int mu, int d);
// Fibers are the hyperplanes sum_j zeta_j (omega^gamma_j - 1) = 0; models
// fields with vanishing discrete divergence.
GroupSpace build_W_div(int mu, int d);

// Frequencies gamma != 0 whose fiber contains a (residual < tol relative).
std::vector<int64_t> omega_inverse(const GroupSpace& sp,
                                   const Eigen::VectorXcd& a,
                                   double tol = 1e-10);
// omega_inverse(a) intersected with its own negation.
std::vector<int64_t> symmetrized_preimage(const GroupSpace& sp,
                                          const Eigen::VectorXcd& a,
                                          double tol = 1e-10);

struct FourierClassification {
  bool ok = false;
  int k = 0;
  double alpha = 0.0;  // k / d
  // Direction achieving the maximal symmetrized count mu^k - 1 with
  // subgroup structure.
  Eigen::VectorXcd witness_direction;
  std::vector<int64_t> witness_subgroup;  // Gamma, 0 included
  // Extremal supports: all cosets of Gamma-perp for each witness subgroup.
  std::vector<std::vector<int64_t>> extremal_supports;
  int64_t max_count_seen = 0;
  bool outside_hypothesis = false;  // divergence space with mu < 4
  std::string failure;
};

// Verifies the symmetrized-preimage count bound mu^k - 1 over random and
// structured directions and exhibits a subgroup witness of the equality
// case.  Sampling cannot cover all of C^l; reports say so via the counts.
FourierClassification classify_geometric_by_fourier(const GroupSpace& sp,
                                                    int k,
                                                    int random_directions = 10000,
                                                    uint64_t seed = 7u);

// Dimension (and optionally a basis) of the intersection of the fibers at
// the given frequencies.
int fiber_intersection_dim(const GroupSpace& sp,
                           const std::vector<int64_t>& gammas,
                           Eigen::MatrixXcd* basis = nullptr,
                           double tol = 1e-9);

struct NonLocalFourierReport {
  bool nonlocal = false;
  int line_dim = 0;  // dim of the fiber intersection over Gamma \ {0}
  std::vector<int> coset_dims;
};

// Spectral non-locality test: the fibers over Gamma \ {0} must meet exactly
// in the line C a, and in {0} over every nontrivial coset of Gamma.
// Precondition: omega_inverse(a) = Gamma \ {0}.
NonLocalFourierReport check_nonlocal_by_fourier(
    const GroupSpace& sp, const std::vector<int64_t>& Gamma,
    const Eigen::VectorXcd& a);

// #{zeta : sum_j a_j (omega^zeta_j - 1) = b} by exhaustive enumeration.
// Every coordinate of a must be nonzero.
int64_t sab_fiber_count(const Eigen::VectorXcd& a, std::complex<double> b,
                        int mu, double tol = 1e-7);

// Convolution kernel together with its symbol constraint M(gamma) in
// Omega(gamma), M(0) = 0; K = m * idft(M).
struct ConvKernel {
  GroupIndex g;
  int l = 1;
  Eigen::MatrixXcd values;  // m x l, K at each group element

  void validate() const;
};

Eigen::MatrixXcd kernel_symbol(const ConvKernel& K);
// Validates the fiber constraints, then K = m * idft(M).
ConvKernel kernel_from_symbol(const GroupSpace& sp,
                              const Eigen::MatrixXcd& symbol,
                              double tol = 1e-9);
ConvKernel random_kernel(const GroupSpace& sp, uint64_t seed);
// Least-norm correction of the symbol coefficients onto the linear
// cancellation constraint set of the space's kind.
ConvKernel canceling_projection(const GroupSpace& sp, const ConvKernel& K);

// Real operator on the realified space: phi[f](x) = Re sum_y <f(y), K(x-y)>
// under the fixed identification.
TransformOp kernel_transform(const GroupSpace& sp, const ConvKernel& K,
                             const Subspace& W_real);

// Gradient-kind cancellation: for every nonempty D in [1..d], the complex
// sum of sum_{j in D} K_j over {x : sum_{j in D} x_j = 0} vanishes.
bool cancellation_grad(const ConvKernel& K, double tol = 1e-10);
// Divergence-kind cancellation: axis sums of K_j over Z_mu e_j vanish, and
// the (K_j - K_i) sums over the diagonal lines y (e_j - e_i) vanish.
bool cancellation_div(const ConvKernel& K, double tol = 1e-10);

// Group average z -> shift_z^{-1} o phi o shift_z; the result commutes with
// every translation.  Intended for operators on a translation-invariant W.
TransformOp phi_averaging(const GroupSpace& sp, const TransformOp& phi);

}  // namespace tracelab
