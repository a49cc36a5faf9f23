#include <doctest.h>

#include <cmath>

#include "tracelab/groupfourier.hpp"
#include "tracelab/kappa.hpp"

using namespace tracelab;

TEST_CASE("profile value is closed-form for a two-valued profile") {
  Eigen::VectorXd v(4);
  v << 1, 1, -1, -1;
  // 1+v = (2,2,0,0): log max + theta log power mean = (1-theta) log 2.
  for (double th : {0.0, 0.2, 0.5, 0.9}) {
    CHECK(kappa_profile(v, th) ==
          doctest::Approx((1.0 - th) * std::log(2.0)).epsilon(1e-12));
  }
  CHECK(kappa_profile(Eigen::VectorXd::Zero(4), 0.3) ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("entropy functional is zero at the center and log m at a spike") {
  Eigen::VectorXd spike(4);
  spike << 3, -1, -1, -1;
  CHECK(entropy_functional(Eigen::VectorXd::Zero(4)) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(entropy_functional(spike) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(entropy_functional(-2 * spike), Error);
}

TEST_CASE("kappa of the full space is (1-theta) log m") {
  for (int m : {2, 3, 4}) {
    Subspace W = Subspace::full(m, 1);
    for (double th : {0.0, 0.25, 0.5, 0.75}) {
      CHECK(kappa_value(W, th).value ==
            doctest::Approx((1.0 - th) * std::log(double(m))).epsilon(1e-8));
    }
    CHECK(kappa_value(W, 1.0).value == 0.0);
  }
}

TEST_CASE("kappa of the gradient space is (1-theta) log 2") {
  Subspace W = build_W_grad(2, 2).realify();
  for (double th : {0.0, 0.25, 0.5, 0.75}) {
    CHECK(kappa_value(W, th).value ==
          doctest::Approx((1.0 - th) * std::log(2.0)).epsilon(1e-8));
  }
}

TEST_CASE("multistart agrees with the grid oracle") {
  Subspace Wg = build_W_grad(2, 2).realify();
  Subspace Wf = Subspace::full(5, 1);
  for (double th : {0.0, 0.5}) {
    CHECK(std::abs(kappa_value(Wg, th).value - kappa_grid_oracle(Wg, th)) <
          1e-4);
    CHECK(std::abs(kappa_value(Wf, th).value - kappa_grid_oracle(Wf, th)) <
          1e-4);
  }
}

TEST_CASE("kappa is convex in theta") {
  Subspace W = build_W_grad(2, 2).realify();
  std::vector<double> vals;
  for (double th : {0.2, 0.4, 0.6}) vals.push_back(kappa_value(W, th).value);
  CHECK(vals[1] <= 0.5 * (vals[0] + vals[2]) + 1e-10);
}

TEST_CASE("derivative at one equals minus the maximal entropy") {
  // Full space: max entropy log m, so alpha = 1.
  Subspace W = Subspace::full(3, 1);
  CHECK(kappa_derivative_at_one(W) ==
        doctest::Approx(-std::log(3.0)).epsilon(1e-8));
}

TEST_CASE("geometric classification of the gradient space") {
  GeometricReport r = is_geometric(build_W_grad(2, 2).realify());
  CHECK(r.geometric);
  CHECK(!r.degenerate);
  CHECK(std::abs(r.alpha - 0.5) < 1e-6);
  CHECK(r.alpha_snapped == 0.5);
  CHECK(std::abs(r.alpha_from_zero - 0.5) < 1e-6);
  CHECK(r.witnesses.size() == 6);
}

TEST_CASE("the zero subspace classifies as degenerate") {
  Subspace W;
  W.m = 3;
  W.ell = 2;
  W.basis.resize(0, 6);
  GeometricReport r = is_geometric(W);
  CHECK(r.degenerate);
  CHECK(std::isnan(r.alpha));
}
