#include "tracelab/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace tracelab {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  require(bool(out), "cannot open file for writing: " + path);
  out << std::setprecision(17);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), "cannot open file for reading: " + path);
  return in;
}

// Writes the 1-based digit string of the leaf with the given index.
void write_digits(std::ostream& out, int m, int depth, int64_t index) {
  AtomPath p = AtomPath::from_index(m, depth, index);
  for (int d : p.digits) out << d << ' ';
}

int64_t read_digits(std::istream& in, int m, int depth) {
  AtomPath p;
  p.digits.resize(size_t(depth));
  for (int i = 0; i < depth; ++i) {
    require(bool(in >> p.digits[size_t(i)]), "truncated digit string");
  }
  return p.index(m);
}

void write_leaf_table(std::ostream& out, int m, int depth,
                      const Eigen::MatrixXd& table) {
  for (int64_t i = 0; i < table.rows(); ++i) {
    write_digits(out, m, depth, i);
    for (Eigen::Index c = 0; c < table.cols(); ++c) out << table(i, c) << ' ';
    out << '\n';
  }
}

Eigen::MatrixXd read_leaf_table(std::istream& in, int m, int depth,
                                int64_t leaves, int cols) {
  Eigen::MatrixXd table(leaves, cols);
  for (int64_t i = 0; i < leaves; ++i) {
    int64_t idx = read_digits(in, m, depth);
    require(idx == i, "leaf lines must appear in lexicographic order");
    for (int c = 0; c < cols; ++c)
      require(bool(in >> table(i, c)), "truncated leaf values");
  }
  return table;
}

}  // namespace

void save_martingale(const SimpleMartingale& F, const std::string& path) {
  F.validate();
  auto out = open_out(path);
  out << F.shape.m << ' ' << F.shape.depth << ' ' << F.shape.leaf_count()
      << ' ' << F.shape.ell << '\n';
  write_leaf_table(out, F.shape.m, F.shape.depth, F.leaves);
}

SimpleMartingale load_martingale(const std::string& path) {
  auto in = open_in(path);
  int m = 0, depth = 0, ell = 0;
  int64_t leaves = 0;
  require(bool(in >> m >> depth >> leaves >> ell), "malformed header");
  TreeShape shape{m, depth, ell};
  shape.validate();
  require(leaves == shape.leaf_count(), "leaf count does not match depth");
  SimpleMartingale F;
  F.shape = shape;
  F.leaves = read_leaf_table(in, m, depth, leaves, ell);
  F.validate();
  return F;
}

void save_measure(const TreeMeasure& nu, const std::string& path) {
  nu.validate();
  auto out = open_out(path);
  out << nu.m << ' ' << nu.depth << ' ' << nu.leaf_mass.size() << " 1\n";
  write_leaf_table(out, nu.m, nu.depth, nu.leaf_mass);
}

TreeMeasure load_measure(const std::string& path) {
  auto in = open_in(path);
  int m = 0, depth = 0, ell = 0;
  int64_t leaves = 0;
  require(bool(in >> m >> depth >> leaves >> ell), "malformed header");
  require(ell == 1, "a measure stores one mass per leaf");
  TreeShape shape{m, depth, 1};
  shape.validate();
  require(leaves == shape.leaf_count(), "leaf count does not match depth");
  TreeMeasure nu;
  nu.m = m;
  nu.depth = depth;
  nu.leaf_mass = read_leaf_table(in, m, depth, leaves, 1);
  nu.validate();
  return nu;
}

void save_subspace(const Subspace& W, const std::string& path) {
  W.validate();
  auto out = open_out(path);
  out << W.m << ' ' << W.ell << ' ' << W.dim();
  if (W.complexified) out << " complexified";
  out << '\n';
  for (int r = 0; r < W.dim(); ++r) {
    for (Eigen::Index c = 0; c < W.basis.cols(); ++c)
      out << W.basis(r, c) << ' ';
    out << '\n';
  }
}

Subspace load_subspace(const std::string& path) {
  auto in = open_in(path);
  std::string header;
  require(bool(std::getline(in, header)), "malformed header");
  std::istringstream hs(header);
  int m = 0, ell = 0, k = 0;
  require(bool(hs >> m >> ell >> k), "malformed header");
  std::string flag;
  bool complexified = bool(hs >> flag) && flag == "complexified";
  require(m >= 2 && ell >= 1 && k >= 0, "invalid subspace header");
  Eigen::MatrixXd rows(k, int64_t(m) * ell);
  for (int r = 0; r < k; ++r)
    for (int64_t c = 0; c < rows.cols(); ++c)
      require(bool(in >> rows(r, c)), "truncated basis row");
  return Subspace::from_rows(m, ell, rows, complexified);
}

void save_transform(const TransformOp& phi, const std::string& path) {
  phi.validate();
  auto out = open_out(path);
  out << phi.m << ' ' << phi.ell << ' ' << phi.m << '\n';
  for (int r = 0; r < phi.m; ++r) {
    for (Eigen::Index c = 0; c < phi.A.cols(); ++c) out << phi.A(r, c) << ' ';
    out << '\n';
  }
}

TransformOp load_transform(const std::string& path) {
  auto in = open_in(path);
  int m = 0, ell = 0, k = 0;
  require(bool(in >> m >> ell >> k), "malformed header");
  require(k == m, "a transform stores one output row per coordinate");
  require(m >= 2 && ell >= 1, "invalid transform header");
  TransformOp phi;
  phi.m = m;
  phi.ell = ell;
  phi.A.resize(m, int64_t(m) * ell);
  for (int r = 0; r < m; ++r)
    for (int64_t c = 0; c < phi.A.cols(); ++c)
      require(bool(in >> phi.A(r, c)), "truncated transform row");
  phi.validate();
  return phi;
}

namespace {

void save_complex_table(const GroupIndex& g, const Eigen::MatrixXcd& table,
                        const std::string& path) {
  g.validate();
  require(table.rows() == g.size(), "row count does not match group order");
  auto out = open_out(path);
  out << g.mu << ' ' << g.d << ' ' << table.cols() << '\n';
  for (int64_t i = 0; i < table.rows(); ++i) {
    for (int c : g.unflatten(i)) out << c << ' ';
    for (Eigen::Index c = 0; c < table.cols(); ++c)
      out << table(i, c).real() << ' ' << table(i, c).imag() << ' ';
    out << '\n';
  }
}

std::pair<GroupIndex, Eigen::MatrixXcd> load_complex_table(
    const std::string& path) {
  auto in = open_in(path);
  int mu = 0, d = 0, l = 0;
  require(bool(in >> mu >> d >> l), "malformed header");
  GroupIndex g{mu, d};
  g.validate();
  require(l >= 1, "component count must be positive");
  Eigen::MatrixXcd table(g.size(), l);
  std::vector<int> coord(static_cast<size_t>(d));
  for (int64_t i = 0; i < table.rows(); ++i) {
    for (int j = 0; j < d; ++j)
      require(bool(in >> coord[size_t(j)]), "truncated coordinates");
    require(g.flatten(coord) == i, "element lines must appear in order");
    for (int c = 0; c < l; ++c) {
      double re = 0, im = 0;
      require(bool(in >> re >> im), "truncated complex values");
      table(i, c) = std::complex<double>(re, im);
    }
  }
  return {g, table};
}

}  // namespace

void save_kernel(const ConvKernel& K, const std::string& path) {
  K.validate();
  save_complex_table(K.g, K.values, path);
}

ConvKernel load_kernel(const std::string& path) {
  auto [g, table] = load_complex_table(path);
  ConvKernel K;
  K.g = g;
  K.l = int(table.cols());
  K.values = std::move(table);
  K.validate();
  return K;
}

void save_symbol(const GroupIndex& g, const Eigen::MatrixXcd& M,
                 const std::string& path) {
  save_complex_table(g, M, path);
}

std::pair<GroupIndex, Eigen::MatrixXcd> load_symbol(const std::string& path) {
  return load_complex_table(path);
}

std::string martingale_json(const SimpleMartingale& F) {
  F.validate();
  nlohmann::json j;
  j["m"] = F.shape.m;
  j["depth"] = F.shape.depth;
  j["ell"] = F.shape.ell;
  std::vector<std::vector<double>> rows;
  for (int64_t i = 0; i < F.leaves.rows(); ++i) {
    std::vector<double> row(size_t(F.shape.ell));
    for (int c = 0; c < F.shape.ell; ++c) row[size_t(c)] = F.leaves(i, c);
    rows.push_back(std::move(row));
  }
  j["leaves"] = rows;
  return j.dump();
}

std::string measure_json(const TreeMeasure& nu) {
  nu.validate();
  nlohmann::json j;
  j["m"] = nu.m;
  j["depth"] = nu.depth;
  std::vector<double> masses(size_t(nu.leaf_mass.size()));
  for (int64_t i = 0; i < nu.leaf_mass.size(); ++i) masses[size_t(i)] = nu.leaf_mass[i];
  j["masses"] = masses;
  return j.dump();
}

}  // namespace tracelab
