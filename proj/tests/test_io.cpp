#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tracelab/experiments.hpp"
#include "tracelab/groupfourier.hpp"
#include "tracelab/io.hpp"

using namespace tracelab;

namespace {

std::string tmp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("martingale files round trip bit for bit") {
  Subspace W = build_W_grad(2, 2).realify();
  Rng rng(1);
  SimpleMartingale F = random_sobolev_martingale(W, 3, 0.5, rng);
  const std::string path = tmp_path("tracelab_io_mart.txt");
  save_martingale(F, path);
  SimpleMartingale back = load_martingale(path);
  CHECK(back.shape.m == F.shape.m);
  CHECK(back.shape.depth == F.shape.depth);
  CHECK(back.shape.ell == F.shape.ell);
  CHECK((back.leaves - F.leaves).norm() == 0.0);
}

TEST_CASE("leaf tables must keep lexicographic order") {
  Subspace W = Subspace::full(2, 1);
  Rng rng(2);
  SimpleMartingale F = random_sobolev_martingale(W, 2, 0.5, rng);
  const std::string path = tmp_path("tracelab_io_order.txt");
  save_martingale(F, path);

  std::string text = slurp(path);
  std::vector<std::string> lines;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) lines.push_back(line);
  REQUIRE(lines.size() == 5);  // header + 4 leaves
  std::swap(lines[1], lines[2]);
  std::string swapped;
  for (const auto& l : lines) swapped += l + "\n";
  spit(path, swapped);
  CHECK_THROWS_AS(load_martingale(path), Error);

  // Truncation is a hard error, not a silent short read.
  spit(path, text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_martingale(path), Error);
}

TEST_CASE("measure files round trip and reject negative masses") {
  TreeMeasure nu = random_frostman_measure(3, 3, 0.5, 4);
  const std::string path = tmp_path("tracelab_io_measure.txt");
  save_measure(nu, path);
  TreeMeasure back = load_measure(path);
  CHECK(back.m == nu.m);
  CHECK(back.depth == nu.depth);
  CHECK((back.leaf_mass - nu.leaf_mass).norm() == 0.0);

  spit(path, "2 1 2 1\n1 -0.5\n2 0.5\n");
  CHECK_THROWS_AS(load_measure(path), Error);
}

TEST_CASE("subspace files keep the basis and the field marker") {
  Subspace W = build_W_grad(3, 2).realify();
  REQUIRE(W.complexified);
  const std::string path = tmp_path("tracelab_io_subspace.txt");
  save_subspace(W, path);
  Subspace back = load_subspace(path);
  CHECK(back.m == W.m);
  CHECK(back.ell == W.ell);
  CHECK(back.complexified);
  CHECK((back.basis - W.basis).norm() == 0.0);

  Eigen::MatrixXd rows(1, 4);
  rows << 1, -1, -1, 1;
  Subspace plain = Subspace::from_rows(2, 2, rows);
  save_subspace(plain, path);
  CHECK(!load_subspace(path).complexified);
}

TEST_CASE("transform files round trip the acting matrix") {
  Subspace W = build_W_grad(2, 2).realify();
  TransformOp phi = random_transform(W, 5);
  const std::string path = tmp_path("tracelab_io_transform.txt");
  save_transform(phi, path);
  TransformOp back = load_transform(path);
  CHECK(back.m == phi.m);
  CHECK(back.ell == phi.ell);
  CHECK((back.A - phi.A).norm() == 0.0);
}

TEST_CASE("kernel and symbol files round trip complex data") {
  GroupSpace sp = build_W_div(4, 2);
  ConvKernel K = random_kernel(sp, 6);
  const std::string kpath = tmp_path("tracelab_io_kernel.txt");
  save_kernel(K, kpath);
  ConvKernel back = load_kernel(kpath);
  CHECK(back.g.mu == K.g.mu);
  CHECK(back.g.d == K.g.d);
  CHECK(back.l == K.l);
  CHECK((back.values - K.values).norm() == 0.0);

  Eigen::MatrixXcd M = kernel_symbol(K);
  const std::string spath = tmp_path("tracelab_io_symbol.txt");
  save_symbol(sp.g, M, spath);
  auto [g, Mback] = load_symbol(spath);
  CHECK(g.mu == sp.g.mu);
  CHECK(g.d == sp.g.d);
  CHECK((Mback - M).norm() == 0.0);
  // The symbol reproduces the kernel through the fiber constructor.
  ConvKernel rebuilt = kernel_from_symbol(sp, Mback);
  CHECK((rebuilt.values - K.values).norm() < 1e-9);
}

TEST_CASE("json exports parse and carry the full data") {
  Subspace W = Subspace::full(3, 2);
  Rng rng(8);
  SimpleMartingale F = random_sobolev_martingale(W, 2, 0.5, rng);
  nlohmann::json j = nlohmann::json::parse(martingale_json(F));
  CHECK(j["m"] == 3);
  CHECK(j["depth"] == 2);
  CHECK(j["ell"] == 2);
  REQUIRE(j["leaves"].size() == 9);
  CHECK(j["leaves"][4][1].get<double>() == F.leaves(4, 1));

  TreeMeasure nu = random_frostman_measure(2, 3, 0.5, 9);
  nlohmann::json mj = nlohmann::json::parse(measure_json(nu));
  CHECK(mj["m"] == 2);
  CHECK(mj["depth"] == 3);
  REQUIRE(mj["masses"].size() == 8);
  CHECK(mj["masses"][5].get<double>() == nu.leaf_mass[5]);
}
