#include <doctest.h>

#include "tracelab/madic.hpp"

using namespace tracelab;

TEST_CASE("atom paths round-trip through lexicographic ranks") {
  const int m = 3, depth = 4;
  for (int64_t i = 0; i < ipow(m, depth); ++i) {
    AtomPath p = AtomPath::from_index(m, depth, i);
    CHECK(p.level() == depth);
    for (int d : p.digits) {
      CHECK(d >= 1);
      CHECK(d <= m);
    }
    CHECK(p.index(m) == i);
  }
}

TEST_CASE("digit strings are ordered lexicographically") {
  const int m = 4, depth = 3;
  AtomPath prev = AtomPath::from_index(m, depth, 0);
  for (int64_t i = 1; i < ipow(m, depth); ++i) {
    AtomPath cur = AtomPath::from_index(m, depth, i);
    CHECK(std::lexicographical_compare(prev.digits.begin(), prev.digits.end(),
                                       cur.digits.begin(), cur.digits.end()));
    prev = cur;
  }
}

TEST_CASE("ultrametric distance is m^(-shared prefix)") {
  AtomPath a{{1, 2, 3}};
  AtomPath b{{1, 2, 1}};
  AtomPath c{{2, 2, 3}};
  CHECK(ultrametric_distance(a, b, 3) == doctest::Approx(1.0 / 9).epsilon(1e-15));
  CHECK(ultrametric_distance(a, c, 3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ultrametric_distance(a, a, 3) == doctest::Approx(1.0 / 27).epsilon(1e-15));

  // Ultrametric triangle inequality on a sample of triples.
  Rng rng(41);
  const int m = 3, depth = 5;
  for (int trial = 0; trial < 200; ++trial) {
    AtomPath x = AtomPath::from_index(m, depth, rng.below(243));
    AtomPath y = AtomPath::from_index(m, depth, rng.below(243));
    AtomPath z = AtomPath::from_index(m, depth, rng.below(243));
    const double dxz = ultrametric_distance(x, z, m);
    const double dxy = ultrametric_distance(x, y, m);
    const double dyz = ultrametric_distance(y, z, m);
    CHECK(dxz <= std::max(dxy, dyz) + 1e-15);
  }
}

TEST_CASE("level values are block averages and satisfy the tower property") {
  Rng rng(7);
  SimpleMartingale F;
  F.shape = {3, 3, 2};
  F.leaves.resize(F.shape.leaf_count(), 2);
  for (int64_t i = 0; i < F.leaves.size(); ++i)
    F.leaves(i / 2, i % 2) = rng.normal();
  F.validate();

  for (int n = 0; n < 3; ++n) {
    Eigen::MatrixXd coarse = F.level_values(n);
    Eigen::MatrixXd fine = F.level_values(n + 1);
    for (int64_t p = 0; p < coarse.rows(); ++p) {
      Eigen::RowVectorXd avg = Eigen::RowVectorXd::Zero(2);
      for (int j = 0; j < 3; ++j) avg += fine.row(p * 3 + j);
      avg /= 3.0;
      CHECK((avg - coarse.row(p)).norm() < 1e-12);
    }
  }
  // Root value equals the overall mean.
  CHECK((F.level_values(0).row(0) -
         Eigen::RowVectorXd(F.leaves.colwise().mean()))
            .norm() < 1e-12);
}

TEST_CASE("differences have zero column means") {
  Rng rng(19);
  SimpleMartingale F;
  F.shape = {4, 2, 3};
  F.leaves.resize(16, 3);
  for (int64_t i = 0; i < F.leaves.size(); ++i)
    F.leaves(i / 3, i % 3) = rng.uniform(-2, 2);
  for (int64_t p = 0; p < 4; ++p) {
    Eigen::MatrixXd d = F.difference(1, p);
    CHECK(d.rows() == 4);
    CHECK(d.colwise().mean().norm() < 1e-12);
    // Kid value = parent value + difference row.
    for (int j = 0; j < 4; ++j) {
      CHECK((F.atom_value(2, p * 4 + j).transpose() -
             (F.atom_value(1, p).transpose() + d.row(j)))
                .norm() < 1e-12);
    }
  }
}

TEST_CASE("measure and density martingale are inverse to each other") {
  Rng rng(3);
  TreeMeasure nu;
  nu.m = 3;
  nu.depth = 3;
  nu.leaf_mass.resize(27);
  for (int i = 0; i < 27; ++i) nu.leaf_mass[i] = rng.uniform();
  nu.validate();

  SimpleMartingale f = measure_to_martingale(nu);
  // Leaf density = mass * m^depth; atom value = m^level * atom mass.
  CHECK(f.shape.ell == 1);
  for (int n = 0; n <= 3; ++n) {
    for (int64_t i = 0; i < ipow(3, n); ++i) {
      CHECK(f.atom_value(n, i)[0] ==
            doctest::Approx(std::pow(3.0, n) * nu.atom_mass(n, i))
                .epsilon(1e-12));
    }
  }
  TreeMeasure back = martingale_to_measure(f);
  CHECK((back.leaf_mass - nu.leaf_mass).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("lq norms interpolate between l1 and the max") {
  SimpleMartingale F;
  F.shape = {2, 2, 1};
  F.leaves.resize(4, 1);
  F.leaves << 1, 1, 1, 3;
  CHECK(F.l1_norm() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(F.lq_norm(2, 1.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(F.lq_norm(2, 2.0) ==
        doctest::Approx(std::sqrt((1 + 1 + 1 + 9) / 4.0)).epsilon(1e-15));
  // Monotone in q.
  CHECK(F.lq_norm(2, 1.0) <= F.lq_norm(2, 1.5) + 1e-15);
  CHECK(F.lq_norm(2, 1.5) <= F.lq_norm(2, 4.0) + 1e-15);
}
