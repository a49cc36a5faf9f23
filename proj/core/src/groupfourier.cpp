#include "tracelab/groupfourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "tracelab/common.hpp"

namespace tracelab {

namespace {

using cd = std::complex<double>;

cd unit_root(int mu, int power) {
  double ang = 2.0 * std::numbers::pi * double(((power % mu) + mu) % mu) / double(mu);
  return {std::cos(ang), std::sin(ang)};
}

}  // namespace

void GroupIndex::validate() const {
  require(mu >= 2, "group order must be at least 2");
  require(d >= 1, "dimension must be positive");
  require(d * std::log2(double(mu)) < 24.0, "group too large");
}

std::vector<int> GroupIndex::unflatten(int64_t i) const {
  require(i >= 0 && i < size(), "group index out of range");
  std::vector<int> x(d);
  for (int j = d - 1; j >= 0; --j) {
    x[j] = int(i % mu);
    i /= mu;
  }
  return x;
}

int64_t GroupIndex::flatten(const std::vector<int>& x) const {
  require(int(x.size()) == d, "coordinate count mismatch");
  int64_t i = 0;
  for (int j = 0; j < d; ++j) {
    int c = ((x[j] % mu) + mu) % mu;
    i = i * mu + c;
  }
  return i;
}

int64_t GroupIndex::add(int64_t a, int64_t b) const {
  auto xa = unflatten(a), xb = unflatten(b);
  for (int j = 0; j < d; ++j) xa[j] += xb[j];
  return flatten(xa);
}

int64_t GroupIndex::neg(int64_t a) const {
  auto x = unflatten(a);
  for (int j = 0; j < d; ++j) x[j] = -x[j];
  return flatten(x);
}

int GroupIndex::dot(int64_t a, int64_t b) const {
  auto xa = unflatten(a), xb = unflatten(b);
  int64_t s = 0;
  for (int j = 0; j < d; ++j) s += int64_t(xa[j]) * xb[j];
  return int(((s % mu) + mu) % mu);
}

int64_t GroupIndex::unit(int j) const {
  require(j >= 0 && j < d, "axis out of range");
  std::vector<int> x(d, 0);
  x[j] = 1;
  return flatten(x);
}

CFunction dft(const GroupIndex& g, const CFunction& f) {
  g.validate();
  int64_t m = g.size();
  require(f.rows() == m, "function row count must match group order");
  CFunction out = CFunction::Zero(m, f.cols());
  for (int64_t gamma = 0; gamma < m; ++gamma)
    for (int64_t x = 0; x < m; ++x)
      out.row(gamma) += unit_root(g.mu, -g.dot(gamma, x)) * f.row(x);
  return out;
}

CFunction idft(const GroupIndex& g, const CFunction& fhat) {
  g.validate();
  int64_t m = g.size();
  require(fhat.rows() == m, "function row count must match group order");
  CFunction out = CFunction::Zero(m, fhat.cols());
  for (int64_t x = 0; x < m; ++x)
    for (int64_t gamma = 0; gamma < m; ++gamma)
      out.row(x) += unit_root(g.mu, g.dot(gamma, x)) * fhat.row(gamma);
  return out / double(m);
}

Eigen::VectorXd real_identify(const Eigen::VectorXcd& z) {
  Eigen::VectorXd x(2 * z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    x[2 * i] = z[i].real();
    x[2 * i + 1] = z[i].imag();
  }
  return x;
}

Eigen::VectorXcd complex_identify(const Eigen::VectorXd& x) {
  require(x.size() % 2 == 0, "real vector must have even length");
  Eigen::VectorXcd z(x.size() / 2);
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = cd(x[2 * i], x[2 * i + 1]);
  return z;
}

Eigen::MatrixXcd GroupSpace::fiber(int64_t gamma) const {
  require(gamma >= 0 && gamma < m(), "frequency out of range");
  if (gamma == 0) return Eigen::MatrixXcd::Zero(l, 0);
  Eigen::VectorXcd w(g.d);
  for (int j = 0; j < g.d; ++j)
    w[j] = unit_root(g.mu, g.dot(gamma, g.unit(j))) - 1.0;
  if (kind == SpaceKind::Gradient) return w.normalized();
  // Divergence fiber: Hermitian orthocomplement of conj(w), since
  // sum_j zeta_j w_j = <zeta, conj(w)>.
  Eigen::MatrixXcd col = w.conjugate();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(col);
  Eigen::MatrixXcd Q = qr.householderQ();
  return Q.rightCols(l - 1);
}

Subspace GroupSpace::realify() const {
  int64_t mm = m();
  int ell = 2 * l;
  std::vector<Eigen::VectorXd> rows;
  double scale = 1.0 / std::sqrt(double(mm));
  for (int64_t gamma = 1; gamma < mm; ++gamma) {
    Eigen::MatrixXcd F = fiber(gamma);
    for (Eigen::Index r = 0; r < F.cols(); ++r) {
      // f(x) = omega^(gamma.x) eta and its i-multiple, realified; these are
      // exactly orthonormal by character orthogonality.
      for (cd mult : {cd(1, 0), cd(0, 1)}) {
        Eigen::VectorXd row(mm * ell);
        for (int64_t x = 0; x < mm; ++x) {
          Eigen::VectorXcd fx = mult * unit_root(g.mu, g.dot(gamma, x)) * F.col(r);
          row.segment(x * ell, ell) = real_identify(fx) * scale;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  Subspace W;
  W.m = int(mm);
  W.ell = ell;
  W.complexified = true;
  W.basis.resize(Eigen::Index(rows.size()), mm * ell);
  for (size_t i = 0; i < rows.size(); ++i) W.basis.row(Eigen::Index(i)) = rows[i];
  W.validate();
  return W;
}

GroupSpace build_W_grad(int mu, int d) {
  GroupSpace sp;
  sp.g = GroupIndex{mu, d};
  sp.g.validate();
  sp.kind = SpaceKind::Gradient;
  sp.l = d;
  return sp;
}

GroupSpace build_W_div(int mu, int d) {
  require(d >= 2, "divergence space needs at least two axes");
  GroupSpace sp;
  sp.g = GroupIndex{mu, d};
  sp.g.validate();
  sp.kind = SpaceKind::Divergence;
  sp.l = d;
  return sp;
}

std::vector<int64_t> omega_inverse(const GroupSpace& sp,
                                   const Eigen::VectorXcd& a, double tol) {
  require(a.size() == sp.l, "direction has wrong dimension");
  double na = a.norm();
  require(na > 0, "direction must be nonzero");
  std::vector<int64_t> hits;
  for (int64_t gamma = 1; gamma < sp.m(); ++gamma) {
    Eigen::MatrixXcd F = sp.fiber(gamma);
    double res = (a - F * (F.adjoint() * a)).norm();
    if (res <= tol * na) hits.push_back(gamma);
  }
  return hits;
}

std::vector<int64_t> symmetrized_preimage(const GroupSpace& sp,
                                          const Eigen::VectorXcd& a,
                                          double tol) {
  auto hits = omega_inverse(sp, a, tol);
  std::set<int64_t> pos(hits.begin(), hits.end());
  std::vector<int64_t> sym;
  for (int64_t gamma : hits)
    if (pos.count(sp.g.neg(gamma))) sym.push_back(gamma);
  return sym;
}

namespace {

bool is_subgroup(const GroupIndex& g, const std::set<int64_t>& S) {
  if (!S.count(0)) return false;
  for (int64_t a : S)
    for (int64_t b : S)
      if (!S.count(g.add(a, g.neg(b)))) return false;
  return true;
}

// All cosets of the annihilator {x : gamma.x = 0 for all gamma in Gamma}.
std::vector<std::vector<int64_t>> annihilator_cosets(
    const GroupIndex& g, const std::vector<int64_t>& Gamma) {
  int64_t m = g.size();
  std::vector<int64_t> perp;
  for (int64_t x = 0; x < m; ++x) {
    bool in = true;
    for (int64_t gamma : Gamma)
      if (g.dot(gamma, x) != 0) { in = false; break; }
    if (in) perp.push_back(x);
  }
  std::vector<char> seen(size_t(m), 0);
  std::vector<std::vector<int64_t>> cosets;
  for (int64_t c = 0; c < m; ++c) {
    if (seen[size_t(c)]) continue;
    std::vector<int64_t> coset;
    for (int64_t h : perp) {
      int64_t e = g.add(c, h);
      seen[size_t(e)] = 1;
      coset.push_back(e);
    }
    std::sort(coset.begin(), coset.end());
    cosets.push_back(std::move(coset));
  }
  return cosets;
}

}  // namespace

FourierClassification classify_geometric_by_fourier(const GroupSpace& sp,
                                                    int k,
                                                    int random_directions,
                                                    uint64_t seed) {
  FourierClassification rep;
  rep.k = k;
  rep.alpha = double(k) / double(sp.g.d);
  rep.outside_hypothesis = sp.kind == SpaceKind::Divergence && sp.g.mu < 4;
  int64_t bound = ipow(sp.g.mu, k) - 1;

  std::vector<Eigen::VectorXcd> dirs;
  // Structured directions: the natural candidates for the equality case.
  for (int mask = 1; mask < (1 << sp.g.d); ++mask) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(sp.l);
    for (int j = 0; j < sp.g.d; ++j)
      if (mask & (1 << j)) a[j] = 1.0;
    dirs.push_back(a);
  }
  for (int i = 0; i < sp.g.d; ++i)
    for (int j = 0; j < sp.g.d; ++j)
      if (i != j) {
        Eigen::VectorXcd a = Eigen::VectorXcd::Zero(sp.l);
        a[i] = 1.0;
        a[j] = -1.0;
        dirs.push_back(a);
      }
  Rng rng(seed);
  for (int i = 0; i < random_directions; ++i) {
    Eigen::VectorXcd a(sp.l);
    for (int c = 0; c < sp.l; ++c) a[c] = cd(rng.normal(), rng.normal());
    dirs.push_back(a);
  }

  for (const auto& a : dirs) {
    auto sym = symmetrized_preimage(sp, a);
    int64_t count = int64_t(sym.size());
    rep.max_count_seen = std::max(rep.max_count_seen, count);
    if (count > bound) {
      rep.failure = "symmetrized preimage exceeds the claimed bound";
      return rep;
    }
    if (count == bound && rep.witness_subgroup.empty()) {
      std::set<int64_t> S(sym.begin(), sym.end());
      S.insert(0);
      if (is_subgroup(sp.g, S)) {
        rep.witness_direction = a;
        rep.witness_subgroup.assign(S.begin(), S.end());
      }
    }
  }
  if (rep.witness_subgroup.empty()) {
    rep.failure = "no direction attains the equality case with subgroup structure";
    return rep;
  }
  rep.extremal_supports = annihilator_cosets(sp.g, rep.witness_subgroup);
  rep.ok = true;
  return rep;
}

int fiber_intersection_dim(const GroupSpace& sp,
                           const std::vector<int64_t>& gammas,
                           Eigen::MatrixXcd* basis, double tol) {
  require(!gammas.empty(), "need at least one frequency");
  Eigen::MatrixXcd stack(Eigen::Index(gammas.size()) * sp.l, sp.l);
  for (size_t i = 0; i < gammas.size(); ++i) {
    Eigen::MatrixXcd F = sp.fiber(gammas[i]);
    stack.middleRows(Eigen::Index(i) * sp.l, sp.l) =
        Eigen::MatrixXcd::Identity(sp.l, sp.l) - F * F.adjoint();
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stack, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cutoff = tol * std::max(sv.size() > 0 ? sv[0] : 0.0, 1.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  int dim = sp.l - rank;
  if (basis) *basis = svd.matrixV().rightCols(dim);
  return dim;
}

NonLocalFourierReport check_nonlocal_by_fourier(
    const GroupSpace& sp, const std::vector<int64_t>& Gamma,
    const Eigen::VectorXcd& a) {
  std::set<int64_t> G(Gamma.begin(), Gamma.end());
  require(G.count(0) == 1, "frequency set must contain zero");
  require(is_subgroup(sp.g, G), "frequency set must be a subgroup");
  auto pre = omega_inverse(sp, a);
  std::set<int64_t> P(pre.begin(), pre.end());
  P.insert(0);
  require(P == G, "direction preimage must equal the given subgroup");

  NonLocalFourierReport rep;
  std::vector<int64_t> nz(Gamma.begin(), Gamma.end());
  nz.erase(std::remove(nz.begin(), nz.end(), int64_t(0)), nz.end());
  require(!nz.empty(), "subgroup must be nontrivial");
  Eigen::MatrixXcd basis;
  rep.line_dim = fiber_intersection_dim(sp, nz, &basis);
  bool line_ok = rep.line_dim == 1;
  if (line_ok) {
    Eigen::VectorXcd b = basis.col(0);
    double res = (a - b * (b.adjoint() * a)).norm();
    line_ok = res <= 1e-8 * a.norm();
  }

  bool cosets_ok = true;
  std::vector<char> seen(size_t(sp.m()), 0);
  for (int64_t g0 : G) seen[size_t(g0)] = 1;
  for (int64_t c = 0; c < sp.m(); ++c) {
    if (seen[size_t(c)]) continue;
    std::vector<int64_t> coset;
    for (int64_t g0 : G) {
      int64_t e = sp.g.add(c, g0);
      seen[size_t(e)] = 1;
      coset.push_back(e);
    }
    int dim = fiber_intersection_dim(sp, coset, nullptr);
    rep.coset_dims.push_back(dim);
    if (dim != 0) cosets_ok = false;
  }
  rep.nonlocal = line_ok && cosets_ok;
  return rep;
}

int64_t sab_fiber_count(const Eigen::VectorXcd& a, std::complex<double> b,
                        int mu, double tol) {
  require(mu >= 2, "group order must be at least 2");
  int d = int(a.size());
  require(d >= 1, "direction must be nonempty");
  for (int j = 0; j < d; ++j)
    require(std::abs(a[j]) > 0, "every coordinate of the direction must be nonzero");
  int64_t total = ipow(mu, d);
  require(total <= 10'000'000, "enumeration too large");
  double scale = 1.0 + 2.0 * a.cwiseAbs().sum() + std::abs(b);
  int64_t count = 0;
  std::vector<int> zeta(size_t(d), 0);
  for (int64_t it = 0; it < total; ++it) {
    int64_t v = it;
    cd s = 0;
    for (int j = d - 1; j >= 0; --j) {
      int z = int(v % mu);
      v /= mu;
      s += a[j] * (unit_root(mu, z) - 1.0);
    }
    if (std::abs(s - b) <= tol * scale) ++count;
  }
  return count;
}

void ConvKernel::validate() const {
  g.validate();
  require(l >= 1, "kernel needs at least one component");
  require(values.rows() == g.size() && values.cols() == l,
          "kernel storage shape mismatch");
  require(values.allFinite(), "kernel values must be finite");
}

Eigen::MatrixXcd kernel_symbol(const ConvKernel& K) {
  K.validate();
  return dft(K.g, K.values) / double(K.g.size());
}

ConvKernel kernel_from_symbol(const GroupSpace& sp,
                              const Eigen::MatrixXcd& symbol, double tol) {
  int64_t m = sp.m();
  require(symbol.rows() == m && symbol.cols() == sp.l, "symbol shape mismatch");
  double scale = std::max(symbol.norm(), 1.0);
  require(symbol.row(0).norm() <= tol * scale,
          "symbol must vanish at frequency zero");
  for (int64_t gamma = 1; gamma < m; ++gamma) {
    Eigen::MatrixXcd F = sp.fiber(gamma);
    Eigen::VectorXcd v = symbol.row(gamma).transpose();
    double res = (v - F * (F.adjoint() * v)).norm();
    require(res <= tol * scale, "symbol row lies off the spectral fiber");
  }
  ConvKernel K;
  K.g = sp.g;
  K.l = sp.l;
  K.values = double(m) * idft(sp.g, symbol);
  return K;
}

ConvKernel random_kernel(const GroupSpace& sp, uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(sp.m(), sp.l);
  for (int64_t gamma = 1; gamma < sp.m(); ++gamma) {
    Eigen::MatrixXcd F = sp.fiber(gamma);
    Eigen::VectorXcd c(F.cols());
    for (Eigen::Index r = 0; r < c.size(); ++r)
      c[r] = cd(rng.normal(), rng.normal());
    M.row(gamma) = (F * c).transpose();
  }
  return kernel_from_symbol(sp, M);
}

namespace {

// Complex values of all cancellation functionals for the space's kind.
Eigen::VectorXcd cancellation_values(SpaceKind kind, const ConvKernel& K) {
  const GroupIndex& g = K.g;
  int64_t m = g.size();
  std::vector<cd> vals;
  if (kind == SpaceKind::Gradient) {
    for (int mask = 1; mask < (1 << g.d); ++mask) {
      cd s = 0;
      for (int64_t x = 0; x < m; ++x) {
        auto xs = g.unflatten(x);
        int64_t acc = 0;
        for (int j = 0; j < g.d; ++j)
          if (mask & (1 << j)) acc += xs[j];
        if (acc % g.mu != 0) continue;
        for (int j = 0; j < g.d; ++j)
          if (mask & (1 << j)) s += K.values(x, j);
      }
      vals.push_back(s);
    }
  } else {
    for (int j = 0; j < g.d; ++j) {
      cd s = 0;
      for (int y = 0; y < g.mu; ++y) {
        std::vector<int> x(size_t(g.d), 0);
        x[size_t(j)] = y;
        s += K.values(g.flatten(x), j);
      }
      vals.push_back(s);
    }
    for (int i = 0; i < g.d; ++i)
      for (int j = i + 1; j < g.d; ++j) {
        cd s = 0;
        for (int y = 0; y < g.mu; ++y) {
          std::vector<int> x(size_t(g.d), 0);
          x[size_t(j)] = y;
          x[size_t(i)] = -y;
          int64_t e = g.flatten(x);
          s += K.values(e, j) - K.values(e, i);
        }
        vals.push_back(s);
      }
  }
  return Eigen::Map<Eigen::VectorXcd>(vals.data(), Eigen::Index(vals.size()));
}

bool cancellation_holds(SpaceKind kind, const ConvKernel& K, double tol) {
  K.validate();
  Eigen::VectorXcd v = cancellation_values(kind, K);
  double scale = std::max(K.values.norm(), 1e-300);
  return v.lpNorm<Eigen::Infinity>() <= tol * scale;
}

}  // namespace

bool cancellation_grad(const ConvKernel& K, double tol) {
  return cancellation_holds(SpaceKind::Gradient, K, tol);
}

bool cancellation_div(const ConvKernel& K, double tol) {
  return cancellation_holds(SpaceKind::Divergence, K, tol);
}

ConvKernel canceling_projection(const GroupSpace& sp, const ConvKernel& K) {
  K.validate();
  require(K.g.mu == sp.g.mu && K.g.d == sp.g.d && K.l == sp.l,
          "kernel does not match the space");
  int64_t m = sp.m();
  // Fiber coefficient layout: coefficients of fiber columns, frequency-major.
  std::vector<std::pair<int64_t, int>> slots;
  for (int64_t gamma = 1; gamma < m; ++gamma) {
    int r = int(sp.fiber(gamma).cols());
    for (int q = 0; q < r; ++q) slots.emplace_back(gamma, q);
  }
  Eigen::Index n = Eigen::Index(slots.size());

  Eigen::MatrixXcd M0 = kernel_symbol(K);
  Eigen::VectorXcd c0(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    auto [gamma, r] = slots[size_t(q)];
    Eigen::MatrixXcd F = sp.fiber(gamma);
    c0[q] = F.col(r).adjoint() * M0.row(gamma).transpose();
  }

  // Response of each cancellation functional to each unit coefficient.
  Eigen::MatrixXcd L;
  for (Eigen::Index q = 0; q < n; ++q) {
    auto [gamma, r] = slots[size_t(q)];
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(m, sp.l);
    M.row(gamma) = sp.fiber(gamma).col(r).transpose();
    ConvKernel unit;
    unit.g = sp.g;
    unit.l = sp.l;
    unit.values = double(m) * idft(sp.g, M);
    Eigen::VectorXcd col = cancellation_values(sp.kind, unit);
    if (L.size() == 0) L.resize(col.size(), n);
    L.col(q) = col;
  }

  // Least-norm move onto the null space of L.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(L);
  Eigen::VectorXcd c = c0 - cod.solve(L * c0);
  // A full-rank constraint system leaves only numerical residue; snap it so
  // the zero kernel comes out exact and passes the boolean checks.
  const double snap = 1e-13 * std::max(1.0, c0.norm());
  for (Eigen::Index q = 0; q < n; ++q)
    if (std::abs(c[q]) <= snap) c[q] = 0.0;

  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(m, sp.l);
  for (Eigen::Index q = 0; q < n; ++q) {
    auto [gamma, r] = slots[size_t(q)];
    M.row(gamma) += (sp.fiber(gamma).col(r) * c[q]).transpose();
  }
  return kernel_from_symbol(sp, M);
}

TransformOp kernel_transform(const GroupSpace& sp, const ConvKernel& K,
                             const Subspace& W_real) {
  K.validate();
  require(K.g.mu == sp.g.mu && K.g.d == sp.g.d && K.l == sp.l,
          "kernel does not match the space");
  int64_t m = sp.m();
  int ell = 2 * sp.l;
  require(W_real.m == m && W_real.ell == ell, "realified space shape mismatch");
  // phi[f](x) = Re sum_y <f(y), K(x-y)>; the pairing is conjugate-linear in
  // K and linear in f, so under the identification the columns carry
  // (Re K_i, Im K_i).
  Eigen::MatrixXd raw(m, m * ell);
  for (int64_t x = 0; x < m; ++x)
    for (int64_t y = 0; y < m; ++y) {
      int64_t diff = sp.g.add(x, sp.g.neg(y));
      for (int i = 0; i < sp.l; ++i) {
        raw(x, y * ell + 2 * i) = K.values(diff, i).real();
        raw(x, y * ell + 2 * i + 1) = K.values(diff, i).imag();
      }
    }
  return make_transform(W_real, raw);
}

TransformOp phi_averaging(const GroupSpace& sp, const TransformOp& phi) {
  phi.validate();
  int64_t m = sp.m();
  int ell = phi.ell;
  require(phi.m == m, "operator does not act on this group");
  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(m, m * ell);
  for (int64_t z = 0; z < m; ++z) {
    for (int64_t x = 0; x < m; ++x) {
      int64_t xs = sp.g.add(x, z);
      for (int64_t y = 0; y < m; ++y) {
        int64_t ys = sp.g.add(y, z);
        avg.block(x, y * ell, 1, ell) += phi.A.block(xs, ys * ell, 1, ell);
      }
    }
  }
  avg /= double(m);
  TransformOp out;
  out.m = int(m);
  out.ell = ell;
  out.A = std::move(avg);
  out.validate();
  return out;
}

}  // namespace tracelab
