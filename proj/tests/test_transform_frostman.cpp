#include <doctest.h>

#include "tracelab/experiments.hpp"
#include "tracelab/frostman.hpp"
#include "tracelab/groupfourier.hpp"
#include "tracelab/transform.hpp"

using namespace tracelab;

TEST_CASE("transforms center their output and project their input") {
  Subspace W = build_W_grad(2, 2).realify();
  Rng rng(2);
  TransformOp phi = random_transform(W, 13);
  phi.validate();
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::VectorXd w(W.ambient_dim());
    for (int i = 0; i < w.size(); ++i) w[i] = rng.normal();
    Eigen::VectorXd out = phi.apply_vec(w);
    CHECK(out.size() == W.m);
    CHECK(std::abs(out.mean()) < 1e-12 * (1 + out.norm()));
    // Only the projection of the input matters.
    CHECK((phi.apply_vec(W.project(w)) - out).norm() <
          1e-10 * (1 + out.norm()));
  }
  // Operator norm dominates all sampled responses.
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::VectorXd w(W.ambient_dim());
    for (int i = 0; i < w.size(); ++i) w[i] = rng.normal();
    CHECK(phi.apply_vec(w).norm() <= phi.op_norm() * w.norm() + 1e-12);
  }
}

TEST_CASE("coordinate transform selects one component on W") {
  Subspace W = Subspace::full(3, 2);
  TransformOp phi = coordinate_transform(W, 1);
  Eigen::MatrixXd d(3, 2);
  d << 1, 4, -2, 1, 1, -5;  // column means zero
  Eigen::VectorXd out = phi.apply_diff(d);
  for (int j = 0; j < 3; ++j)
    CHECK(out[j] == doctest::Approx(d(j, 1)).epsilon(1e-12));
}

TEST_CASE("canceling detection agrees between projected and raw kernels") {
  GroupSpace sp = build_W_div(4, 2);
  Subspace W = sp.realify();
  ConvKernel K = random_kernel(sp, 77);
  TransformOp raw = kernel_transform(sp, K, W);
  TransformOp proj = kernel_transform(sp, canceling_projection(sp, K), W);
  CHECK(!is_canceling(raw, W, 0.5).canceling);
  CHECK(is_canceling(proj, W, 0.5).canceling);
  CancelReport r = is_canceling(raw, W, 0.5);
  CHECK(r.max_ratio > 1e-10);
  CHECK(r.witness_class >= 0);
}

TEST_CASE("fractional integration partial sums form a martingale and are linear") {
  Subspace W = build_W_grad(2, 2).realify();
  TransformOp phi = random_transform(W, 5);
  Rng rng(6);
  SimpleMartingale F = random_sobolev_martingale(W, 3, 0.5, rng);
  SimpleMartingale Y = i_alpha_partial(F, W, phi, 0.5, 3);
  Y.validate();  // block-average consistency = martingale property

  // Linearity in F for a fixed transform.
  Rng rng2(8);
  SimpleMartingale G = random_sobolev_martingale(W, 3, 0.5, rng2);
  SimpleMartingale FG = F;
  FG.leaves += G.leaves;
  SimpleMartingale YG = i_alpha_partial(G, W, phi, 0.5, 3);
  SimpleMartingale YFG = i_alpha_partial(FG, W, phi, 0.5, 3);
  CHECK((YFG.leaves - (Y.leaves + YG.leaves)).lpNorm<Eigen::Infinity>() <
        1e-10);

  // Strict policy rejects martingales with increments off W.
  SimpleMartingale bad = F;
  bad.leaves(0, 0) += 1.0;
  CHECK_THROWS_AS(i_alpha_partial(bad, W, phi, 0.5, 3), Error);
  // Project policy repairs them.
  SimpleMartingale rep =
      i_alpha_partial(bad, W, phi, 0.5, 3, 0, DiffPolicy::Project);
  CHECK(rep.leaves.allFinite());
}

TEST_CASE("weight shift rescales every term by m^-alpha") {
  Subspace W = build_W_grad(2, 2).realify();
  TransformOp phi = random_transform(W, 55);
  Rng rng(56);
  SimpleMartingale F = random_sobolev_martingale(W, 3, 0.5, rng);
  SimpleMartingale y0 = i_alpha_partial(F, W, phi, 0.5, 3, 0);
  SimpleMartingale y1 = i_alpha_partial(F, W, phi, 0.5, 3, 1);
  const double scale = std::pow(4.0, -0.5);
  CHECK((y1.leaves - scale * y0.leaves).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("per-term integrability bound holds with constant 2") {
  Subspace W = Subspace::full(4, 2);
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    SimpleMartingale F = random_sobolev_martingale(W, 4, 0.6, rng);
    for (int n = 0; n < 4; ++n) {
      HlsBound b = hls_term_bound(F, 2.0, n);
      CHECK(b.ok);
      CHECK(b.lhs <= b.middle + 1e-9 * (1 + b.middle));
      CHECK(b.middle <= b.rhs + 1e-9 * (1 + b.rhs));
    }
  }
}

TEST_CASE("maximal process satisfies its recursion exactly") {
  TreeMeasure nu = random_frostman_measure(3, 4, 0.5, 99);
  MaximalProcess M = maximal_process(nu, 0.5);
  const double r = std::pow(3.0, 0.5);  // m^(1-alpha)
  for (int n = 0; n < 4; ++n) {
    for (int64_t i = 0; i < ipow(3, n); ++i) {
      double kids = 0.0;
      for (int j = 0; j < 3; ++j)
        kids = std::max(kids, M.relative(n + 1, i * 3 + j));
      CHECK(M.relative(n, i) ==
            doctest::Approx(std::max(nu.atom_mass(n, i), r * kids))
                .epsilon(1e-12));
    }
  }
  CHECK(M.root() == doctest::Approx(frostman_sup(nu, 0.5)).epsilon(1e-12));
  // Absolute normalization: max over descendants of m^((1-alpha) level) nu.
  double deep = 0.0;
  for (int n = 1; n <= 4; ++n)
    for (int64_t i = 0; i < ipow(3, n - 1); ++i)
      deep = std::max(deep, std::pow(3.0, 0.5 * n) * nu.atom_mass(n, i));
  CHECK(M.absolute(1, 0) == doctest::Approx(deep).epsilon(1e-12));
  CHECK(M.absolute(0, 0) == doctest::Approx(M.root()).epsilon(1e-12));
}

TEST_CASE("frostman sup of a point mass is the deepest level weight") {
  TreeMeasure nu;
  nu.m = 2;
  nu.depth = 5;
  nu.leaf_mass = Eigen::VectorXd::Zero(32);
  nu.leaf_mass[7] = 1.0;
  CHECK(frostman_sup(nu, 0.5) ==
        doctest::Approx(std::pow(2.0, 0.5 * 5)).epsilon(1e-12));
}

TEST_CASE("random frostman measures saturate without exceeding the cap") {
  for (uint64_t seed : {1u, 2u, 3u, 4u}) {
    TreeMeasure nu = random_frostman_measure(4, 4, 0.5, seed);
    nu.validate();
    const double sup = frostman_sup(nu, 0.5);
    CHECK(sup <= 1.0 + 1e-12);
    CHECK(sup >= 0.5 - 1e-12);
    // Reproducible.
    TreeMeasure again = random_frostman_measure(4, 4, 0.5, seed);
    CHECK((again.leaf_mass - nu.leaf_mass).norm() == 0.0);
  }
}
