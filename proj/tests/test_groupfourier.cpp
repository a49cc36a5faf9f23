#include <doctest.h>

#include <complex>

#include "tracelab/groupfourier.hpp"

using namespace tracelab;

namespace {

CFunction random_cfunction(const GroupIndex& g, int l, uint64_t seed) {
  Rng rng(seed);
  CFunction f(g.size(), l);
  for (int64_t i = 0; i < f.rows(); ++i)
    for (int c = 0; c < l; ++c)
      f(i, c) = std::complex<double>(rng.normal(), rng.normal());
  return f;
}

}  // namespace

TEST_CASE("group index arithmetic is componentwise mod mu") {
  GroupIndex g{4, 2};
  CHECK(g.size() == 16);
  for (int64_t x = 0; x < 16; ++x) {
    CHECK(g.flatten(g.unflatten(x)) == x);
  }
  // First coordinate most significant: (1,0) flattens to mu, (0,1) to 1.
  CHECK(g.flatten({1, 0}) == 4);
  CHECK(g.flatten({0, 1}) == 1);
  CHECK(g.add(g.flatten({3, 2}), g.flatten({2, 3})) == g.flatten({1, 1}));
  CHECK(g.neg(g.flatten({1, 0})) == g.flatten({3, 0}));
  CHECK(g.dot(g.flatten({1, 2}), g.flatten({2, 1})) == (1 * 2 + 2 * 1) % 4);
}

TEST_CASE("dft of a point mass at zero is the constant one") {
  GroupIndex g{3, 2};
  CFunction f = CFunction::Zero(9, 1);
  f(0, 0) = 1.0;
  CFunction fh = dft(g, f);
  for (int64_t i = 0; i < 9; ++i)
    CHECK(std::abs(fh(i, 0) - 1.0) < 1e-14);
}

TEST_CASE("dft of a subgroup indicator concentrates on the annihilator") {
  // Gamma-perp = {x : x1 = 0} in (Z_4)^2; its dft is 4 on the annihilator
  // {gamma : gamma2 = 0} and 0 elsewhere.
  GroupIndex g{4, 2};
  CFunction f = CFunction::Zero(16, 1);
  for (int x2 = 0; x2 < 4; ++x2) f(g.flatten({0, x2}), 0) = 1.0;
  CFunction fh = dft(g, f);
  for (int64_t i = 0; i < 16; ++i) {
    auto coords = g.unflatten(i);
    const double expect = coords[1] == 0 ? 4.0 : 0.0;
    CHECK(std::abs(fh(i, 0) - expect) < 1e-12);
  }
}

TEST_CASE("dft round-trip and Parseval") {
  for (auto [mu, d] : {std::pair{2, 2}, {3, 2}, {4, 2}, {2, 3}}) {
    GroupIndex g{mu, d};
    CFunction f = random_cfunction(g, 2, 100 + mu * 10 + d);
    CFunction fh = dft(g, f);
    CHECK((idft(g, fh) - f).norm() < 1e-12 * f.norm());
    // sum |fhat|^2 = m sum |f|^2.
    CHECK(fh.squaredNorm() ==
          doctest::Approx(double(g.size()) * f.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("realified spaces have the documented dimensions") {
  CHECK(build_W_grad(2, 2).realify().dim() == 6);
  CHECK(build_W_grad(3, 2).realify().dim() == 16);
  CHECK(build_W_div(4, 2).realify().dim() == 30);
  Subspace W = build_W_div(4, 2).realify();
  CHECK(W.m == 16);
  CHECK(W.ell == 4);
  CHECK(W.complexified);
  CHECK((W.basis * W.basis.transpose() -
         Eigen::MatrixXd::Identity(W.dim(), W.dim()))
            .norm() < 1e-10);
}

TEST_CASE("gradient fibers are the normalized difference characters") {
  GroupSpace sp = build_W_grad(3, 2);
  for (int64_t gamma = 1; gamma < sp.m(); ++gamma) {
    Eigen::MatrixXcd F = sp.fiber(gamma);
    CHECK(F.cols() == 1);
    auto coords = sp.g.unflatten(gamma);
    Eigen::VectorXcd w(2);
    for (int j = 0; j < 2; ++j) {
      w[j] = std::polar(1.0, 2 * 3.14159265358979323846 * coords[j] / 3.0) -
             1.0;
    }
    w.normalize();
    // Same line: the cross term has unit modulus.
    CHECK(std::abs(std::abs((F.col(0).adjoint() * w)(0, 0)) - 1.0) < 1e-12);
  }
}

TEST_CASE("divergence fibers are orthogonal to the conjugate gradient symbol") {
  GroupSpace sp = build_W_div(4, 3);
  for (int64_t gamma = 1; gamma < sp.m(); ++gamma) {
    Eigen::MatrixXcd F = sp.fiber(gamma);
    CHECK(F.cols() == 2);
    auto coords = sp.g.unflatten(gamma);
    Eigen::VectorXcd w(3);
    for (int j = 0; j < 3; ++j) {
      w[j] = std::polar(1.0, 2 * 3.14159265358979323846 * coords[j] / 4.0) -
             1.0;
    }
    CHECK((F.adjoint() * w.conjugate()).norm() < 1e-10);
    CHECK((F.adjoint() * F - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-12);
  }
}

TEST_CASE("spectral classification matches the kappa route") {
  GroupSpace sp = build_W_grad(2, 2);
  FourierClassification fc = classify_geometric_by_fourier(sp, 1, 500, 7);
  CHECK(fc.ok);
  CHECK(fc.alpha == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(fc.witness_subgroup.size() == 2);  // 0 and one nonzero frequency
  CHECK(!fc.extremal_supports.empty());
  NonLocalFourierReport nf =
      check_nonlocal_by_fourier(sp, fc.witness_subgroup, fc.witness_direction);
  CHECK(nf.nonlocal);
  CHECK(nf.line_dim == 1);
}

TEST_CASE("divergence below mu=4 carries the hypothesis flag") {
  FourierClassification fc =
      classify_geometric_by_fourier(build_W_div(3, 2), 1, 200, 7);
  CHECK(fc.outside_hypothesis);
  CHECK(!classify_geometric_by_fourier(build_W_div(4, 2), 1, 200, 7)
             .outside_hypothesis);
}

TEST_CASE("fiber count dichotomy: at most 2 or exactly mu") {
  // a = (1,1), b = -2, mu = 4: the two circles coincide, #S = mu.
  Eigen::VectorXcd a(2);
  a << 1.0, 1.0;
  CHECK(sab_fiber_count(a, -2.0, 4) == 4);
  // Generic b for the same a stays within 2.
  CHECK(sab_fiber_count(a, 0.5, 4) <= 2);
  // |a1| != |a2|: no coincidence possible.
  Eigen::VectorXcd b(2);
  b << 2.0, 1.0;
  for (double re : {-3.0, -1.0, 0.0, 1.0}) {
    CHECK(sab_fiber_count(b, std::complex<double>(re, 0.3), 5) <= 2);
  }
  Eigen::VectorXcd z(2);
  z << 0.0, 1.0;
  CHECK_THROWS_AS(sab_fiber_count(z, 0.0, 4), Error);
}

TEST_CASE("kernel symbol constraints round-trip") {
  GroupSpace sp = build_W_grad(2, 2);
  ConvKernel K = random_kernel(sp, 17);
  K.validate();
  Eigen::MatrixXcd M = kernel_symbol(K);
  // M(0) = 0 and every row lies in its fiber.
  CHECK(M.row(0).norm() < 1e-9 * (1 + M.norm()));
  ConvKernel back = kernel_from_symbol(sp, M);
  CHECK((back.values - K.values).norm() < 1e-10 * (1 + K.values.norm()));
}

TEST_CASE("canceling projection enforces the cancellation conditions") {
  GroupSpace spg = build_W_grad(2, 2);
  GroupSpace spg3 = build_W_grad(3, 2);
  GroupSpace spd = build_W_div(4, 2);
  int flipped = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    // On (Z_2)^2 the three constraints span the whole three-dimensional
    // multiplier space, so the projection collapses to the zero kernel.
    ConvKernel Kg = random_kernel(spg, seed);
    ConvKernel Kgc = canceling_projection(spg, Kg);
    CHECK(cancellation_grad(Kgc));
    CHECK(Kgc.values.norm() == 0.0);
    if (!cancellation_grad(Kg)) ++flipped;

    // Larger groups keep a genuinely nonzero canceling family.
    ConvKernel Kg3 = random_kernel(spg3, seed);
    ConvKernel Kg3c = canceling_projection(spg3, Kg3);
    CHECK(cancellation_grad(Kg3c));
    CHECK(Kg3c.values.norm() > 1e-6);

    ConvKernel Kd = random_kernel(spd, seed);
    ConvKernel Kdc = canceling_projection(spd, Kd);
    CHECK(cancellation_div(Kdc));
    CHECK(Kdc.values.norm() > 1e-6);
  }
  // Random kernels are generically non-canceling.
  CHECK(flipped >= 8);
}

TEST_CASE("kernel transforms commute with translations") {
  GroupSpace sp = build_W_grad(2, 2);
  Subspace W = sp.realify();
  ConvKernel K = random_kernel(sp, 29);
  TransformOp phi = kernel_transform(sp, K, W);
  TransformOp avg = phi_averaging(sp, phi);
  CHECK((avg.A - phi.A).norm() < 1e-10 * (1 + phi.A.norm()));

  // A generic non-kernel operator moves under averaging.
  TransformOp rnd = random_transform(W, 31);
  TransformOp rnd_avg = phi_averaging(sp, rnd);
  CHECK((rnd_avg.A - rnd.A).norm() > 1e-6 * rnd.A.norm());
}

TEST_CASE("cancellation of the kernel matches cancellation of its operator") {
  GroupSpace sp = build_W_grad(2, 2);
  Subspace W = sp.realify();
  for (uint64_t seed = 40; seed < 46; ++seed) {
    ConvKernel K = random_kernel(sp, seed);
    if (seed % 2 == 0) K = canceling_projection(sp, K);
    TransformOp phi = kernel_transform(sp, K, W);
    CHECK(cancellation_grad(K) == is_canceling(phi, W, 0.5).canceling);
  }
}
