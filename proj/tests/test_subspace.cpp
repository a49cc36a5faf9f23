#include <doctest.h>

#include "tracelab/groupfourier.hpp"
#include "tracelab/subspace.hpp"

using namespace tracelab;

TEST_CASE("tensor vec and unvec are inverse, row-major over kids") {
  Eigen::MatrixXd x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  Eigen::VectorXd v = tensor_vec(x);
  CHECK(v.size() == 6);
  CHECK(v[0] == 1);
  CHECK(v[2] == 3);
  CHECK(v[3] == 4);
  CHECK((tensor_unvec(v, 2, 3) - x).norm() == 0.0);
}

TEST_CASE("full difference space has dimension (m-1) ell and zero column means") {
  for (int m : {2, 3, 5}) {
    for (int ell : {1, 3}) {
      Subspace W = Subspace::full(m, ell);
      W.validate();
      CHECK(W.dim() == (m - 1) * ell);
      // Every basis row, viewed as an m x ell block, has zero column means.
      for (int r = 0; r < W.dim(); ++r) {
        Eigen::MatrixXd blk = tensor_unvec(W.basis.row(r).transpose(), m, ell);
        CHECK(blk.colwise().mean().norm() < 1e-12);
      }
    }
  }
}

TEST_CASE("projection is idempotent and membership matches the residual") {
  Subspace W = build_W_grad(2, 2).realify();
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(W.ambient_dim());
    for (int i = 0; i < x.size(); ++i) x[i] = rng.normal();
    Eigen::VectorXd p = W.project(x);
    CHECK((W.project(p) - p).norm() < 1e-12);
    CHECK(W.contains(p));
    CHECK(W.membership_residual(p) < 1e-12);
  }
  // A vector with a nonzero component off W is rejected.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(W.ambient_dim());
  x[0] = 1.0;
  if (W.membership_residual(x) > 1e-6) CHECK(!W.contains(x));
}

TEST_CASE("from_rows reorthonormalizes and drops dependent rows") {
  Eigen::MatrixXd rows(3, 4);
  rows.row(0) << 1, -1, -1, 1;
  rows.row(1) << 2, -2, -2, 2;  // dependent
  rows.row(2) << 1, 1, -1, -1;
  Subspace W = Subspace::from_rows(2, 2, rows);
  CHECK(W.dim() == 2);
  CHECK((W.basis * W.basis.transpose() - Eigen::MatrixXd::Identity(2, 2))
            .norm() < 1e-12);
}

TEST_CASE("admissible directions of the zero profile fill the whole fiber") {
  Subspace W = build_W_grad(2, 2).realify();
  Eigen::MatrixXd dirs = admissible_directions(W, Eigen::VectorXd::Zero(4));
  CHECK(dirs.cols() == W.ell);
}

TEST_CASE("extremal classes of the gradient space at order 1/2") {
  Subspace W = build_W_grad(2, 2).realify();
  auto classes = extremal_vectors(W, 0.5);
  CHECK(classes.size() == 6);
  for (const auto& c : classes) {
    CHECK(c.support.size() == 2);
    CHECK(c.directions.cols() == 2);
    // Profile is two-valued: m^alpha - 1 = 1 on the support, -1 off it.
    for (int j = 0; j < 4; ++j) {
      const bool on = std::find(c.support.begin(), c.support.end(), j) !=
                      c.support.end();
      CHECK(c.v[j] == doctest::Approx(on ? 1.0 : -1.0).epsilon(1e-12));
    }
    // Each direction actually produces a member of W.
    for (int r = 0; r < c.directions.cols(); ++r) {
      Eigen::MatrixXd x = c.v * c.directions.col(r).transpose();
      CHECK(W.contains(tensor_vec(x)));
    }
  }
}

TEST_CASE("extremal classes need an integer support size") {
  Subspace W = Subspace::full(4, 1);
  // m^(1-alpha) = 4^0.3 is not an integer.
  CHECK_THROWS_AS(extremal_vectors(W, 0.7), Error);
}

TEST_CASE("non-locality holds for the gradient space and fails for the full space") {
  Subspace Wg = build_W_grad(2, 2).realify();
  NonLocalityReport r = is_nonlocal(Wg, 0.5);
  CHECK(r.nonlocal);
  CHECK(!r.vacuous);
  CHECK(r.classes.size() == 6);
  for (size_t i = 0; i < r.classes.size(); ++i) {
    CHECK(r.solution_dims[i] == r.expected_dims[i]);
    CHECK(r.expected_dims[i] == 2);
  }

  // Full space: alpha = 1, singleton supports, solutions overshoot the line.
  Subspace Wf = Subspace::full(3, 2);
  NonLocalityReport f = is_nonlocal(Wf, 1.0);
  CHECK(!f.nonlocal);
}

TEST_CASE("flatness measures the spread of kid norms around the mean") {
  Eigen::MatrixXd x(2, 2);
  x << 1, 0, 0, 1;
  CHECK(flatness_measure(x) == doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-12));
  Eigen::MatrixXd flat(3, 2);
  flat << 2, 1, 2, 1, 2, 1;
  CHECK(flatness_measure(flat) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("nearest rank-one element vanishes exactly on extremal tuples") {
  Subspace W = build_W_grad(2, 2).realify();
  auto classes = extremal_vectors(W, 0.5);
  REQUIRE(!classes.empty());
  const auto& c = classes.front();
  Eigen::VectorXd a = c.directions.col(0);
  Eigen::MatrixXd kids(4, 4);
  // Kid tuple x_j = (1 + v_j) a: rank one with the extremal profile.
  for (int j = 0; j < 4; ++j) kids.row(j) = (1.0 + c.v[j]) * a.transpose();
  RankOneFit fit = nearest_rank_one(kids, W, 0.5);
  CHECK(fit.distance < 1e-9);
  CHECK((fit.nearest - kids).norm() < 1e-8);

  // Perturbation grows the distance but no faster than the perturbation.
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd noise(4, 4);
    for (int i = 0; i < 16; ++i) noise(i / 4, i % 4) = 0.01 * rng.normal();
    RankOneFit pert = nearest_rank_one(kids + noise, W, 0.5);
    double total = 0.0;
    for (int j = 0; j < 4; ++j) total += noise.row(j).norm();
    CHECK(pert.distance <= total + 1e-9);
  }
}
