#include "cqc/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

namespace cqc {

namespace {

// --- tiny labeled-tensor layer -------------------------------------------
// The boundary contractions juggle 2M+1 (overlap) or 4M+2 (energy) legs;
// doing the index bookkeeping by name keeps the wiring auditable.

struct LT {
  ComplexTensor t;
  std::vector<std::string> lab;
};

long pos(const std::vector<std::string>& lab, const std::string& l) {
  for (size_t i = 0; i < lab.size(); ++i)
    if (lab[i] == l) return static_cast<long>(i);
  throw DimensionError("unknown tensor label: " + l);
}

LT lt_contract(const LT& a, const LT& b,
               const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<std::pair<long, long>> axes;
  std::vector<bool> ap(a.lab.size(), false), bp(b.lab.size(), false);
  for (const auto& [la, lb] : pairs) {
    long ia = pos(a.lab, la), ib = pos(b.lab, lb);
    axes.emplace_back(ia, ib);
    ap[static_cast<size_t>(ia)] = true;
    bp[static_cast<size_t>(ib)] = true;
  }
  LT out;
  out.t = contract(a.t, b.t, axes);
  for (size_t i = 0; i < a.lab.size(); ++i)
    if (!ap[i]) out.lab.push_back(a.lab[i]);
  for (size_t i = 0; i < b.lab.size(); ++i)
    if (!bp[i]) out.lab.push_back(b.lab[i]);
  if (out.lab.empty()) out.lab.push_back("scalar");
  return out;
}

void rename(LT& a, const std::string& from, const std::string& to) {
  a.lab[static_cast<size_t>(pos(a.lab, from))] = to;
}

LT reorder(const LT& a, const std::vector<std::string>& order) {
  std::vector<long> perm;
  for (const auto& l : order) perm.push_back(pos(a.lab, l));
  return {a.t.transpose(perm), order};
}

std::string nm(const char* base, long i) { return base + std::to_string(i); }

LT gate_lt(const ComplexTensor& g) {
  return {g.reshape({2, 2, 2, 2}), {"tl", "tr", "bl", "br"}};
}

LT e0_lt(const std::string& label) {
  ComplexTensor v({2});
  v.data()[0] = 1.0;
  return {v, {label}};
}

// --- overlap network <target| circuit |0...0> ----------------------------
// Columns are contracted one bond at a time. A left boundary after column j
// carries: "al" (MPS bond), "a i" (staircase wire entering gate (i, j+1)
// from the left), "b i" (the open input of gate (i, j) that layer i-1 of
// column j+1 must supply; "b 1" is the fresh |0> of qubit j+1). The right
// boundary mirrors this with labels "A i" / "B i".

std::vector<std::string> bound_labels(long m, const char* a, const char* b) {
  std::vector<std::string> l{"al"};
  for (long i = 1; i <= m; ++i) l.push_back(nm(a, i));
  for (long i = 1; i <= m; ++i) l.push_back(nm(b, i));
  return l;
}

LT left_init(long m) {
  std::vector<long> shape{1};
  for (long i = 0; i < 2 * m; ++i) shape.push_back(2);
  ComplexTensor t(shape);
  for (long w = 0; w < (1L << m); ++w) {
    std::vector<long> idx{0};
    for (long i = 0; i < m; ++i) idx.push_back((w >> i) & 1);
    for (long i = 0; i < m; ++i) idx.push_back((w >> i) & 1);
    t.at(idx) = 1.0;
  }
  return {std::move(t), bound_labels(m, "a", "b")};
}

// R_{N-1}: qubit N wires threaded through column N-1 demands, closed by
// conj(B_N) and the fresh |0>.
LT right_init(const MpsState& target, long m) {
  const auto& bn = target.site_tensors.back();
  const long chi = bn.extent(0);
  std::vector<long> shape{chi};
  for (long i = 0; i < 2 * m; ++i) shape.push_back(2);
  ComplexTensor t(shape);
  for (long al = 0; al < chi; ++al)
    for (long w = 0; w < (1L << m); ++w) {
      // A_i = w bit i-1; B_1 = 0; B_{i+1} = A_i; phys = A_m.
      std::vector<long> idx{al};
      for (long i = 0; i < m; ++i) idx.push_back((w >> i) & 1);
      idx.push_back(0);
      for (long i = 0; i + 1 < m; ++i) idx.push_back((w >> i) & 1);
      t.at(idx) = std::conj(bn.at({al, (w >> (m - 1)) & 1, 0}));
    }
  return {std::move(t), bound_labels(m, "A", "B")};
}

LT left_absorb(LT cur, const SequentialCircuit& c, const MpsState& target,
               long j) {
  const long m = c.order;
  cur = lt_contract(cur, e0_lt("x"), {{"b1", "x"}});
  for (long i = 1; i <= m; ++i) {
    LT g = gate_lt(c.gate(i, j));
    if (i < m)
      cur = lt_contract(cur, g, {{nm("a", i), "bl"}, {nm("b", i + 1), "tl"}});
    else
      cur = lt_contract(cur, g, {{nm("a", m), "bl"}});
    rename(cur, "tr", nm("na", i));
    rename(cur, "br", nm("nb", i));
    if (i == m) rename(cur, "tl", "ph");
  }
  LT bc = {target.site_tensors[static_cast<size_t>(j - 1)].conj(),
           {"cl", "phys", "cr"}};
  cur = lt_contract(cur, bc, {{"al", "cl"}, {"ph", "phys"}});
  rename(cur, "cr", "al");
  for (long i = 1; i <= m; ++i) {
    rename(cur, nm("na", i), nm("a", i));
    rename(cur, nm("nb", i), nm("b", i));
  }
  return reorder(cur, bound_labels(m, "a", "b"));
}

LT right_absorb(LT cur, const SequentialCircuit& c, const MpsState& target,
                long j) {
  const long m = c.order;
  for (long i = 1; i <= m; ++i) {
    LT g = gate_lt(c.gate(i, j));
    cur = lt_contract(cur, g, {{nm("A", i), "tr"}, {nm("B", i), "br"}});
    rename(cur, "bl", nm("nA", i));
    if (i < m)
      rename(cur, "tl", nm("nB", i + 1));
    else
      rename(cur, "tl", "ph");
  }
  LT bc = {target.site_tensors[static_cast<size_t>(j - 1)].conj(),
           {"cl", "phys", "cr"}};
  cur = lt_contract(cur, bc, {{"al", "cr"}, {"ph", "phys"}});
  rename(cur, "cl", "al");
  cur = lt_contract(cur, e0_lt("nB1"), {});
  for (long i = 1; i <= m; ++i) {
    rename(cur, nm("nA", i), nm("A", i));
    rename(cur, nm("nB", i), nm("B", i));
  }
  return reorder(cur, bound_labels(m, "A", "B"));
}

// Environment of gate (skip, j) given boundaries around column j.
ComplexTensor environment_at(const LT& left, const LT& right,
                             const SequentialCircuit& c, const MpsState& target,
                             long j, long skip) {
  const long m = c.order;
  LT cur = lt_contract(left, e0_lt("x"), {{"b1", "x"}});
  for (long i = 1; i <= m; ++i) {
    if (i == skip) continue;
    LT g = gate_lt(c.gate(i, j));
    if (i < m)
      cur = lt_contract(cur, g, {{nm("a", i), "bl"}, {nm("b", i + 1), "tl"}});
    else
      cur = lt_contract(cur, g, {{nm("a", m), "bl"}});
    rename(cur, "tr", nm("na", i));
    rename(cur, "br", nm("nb", i));
    if (i == m) rename(cur, "tl", "ph");
  }
  LT bc = {target.site_tensors[static_cast<size_t>(j - 1)].conj(),
           {"cl", "phys", "cr"}};
  if (skip == m) {
    cur = lt_contract(cur, bc, {{"al", "cl"}});
  } else {
    cur = lt_contract(cur, bc, {{"al", "cl"}, {"ph", "phys"}});
  }
  std::vector<std::pair<std::string, std::string>> pairs{{"cr", "al"}};
  for (long i = 1; i <= m; ++i) {
    if (i == skip) continue;
    pairs.emplace_back(nm("na", i), nm("A", i));
    pairs.emplace_back(nm("nb", i), nm("B", i));
  }
  cur = lt_contract(cur, right, pairs);
  const std::string tl = (skip == m) ? "phys" : nm("b", skip + 1);
  LT e = reorder(cur, {nm("a", skip), nm("B", skip), tl, nm("A", skip)});
  return e.t.reshape({4, 4});
}

void check_compat(const MpsState& target, const SequentialCircuit& c) {
  validate_circuit(c, 1e-10);
  if (target.n_sites() != c.n_sites)
    throw DimensionError("target and circuit sizes differ");
}

// --- checksummed public cache --------------------------------------------

std::uint64_t fnv1a(const void* data, size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t hash_tensor(const ComplexTensor& t, std::uint64_t h) {
  h = fnv1a(t.shape().data(), t.shape().size() * sizeof(long), h);
  return fnv1a(t.data().data(), t.data().size() * sizeof(cxd), h);
}

// Everything a boundary over columns lo..hi was built from.
std::uint64_t hash_span(const MpsState& target, const SequentialCircuit& c,
                        long lo, long hi) {
  std::uint64_t h = 14695981039346656037ULL;
  for (long j = lo; j <= hi; ++j) {
    if (j <= c.n_bonds())
      for (long i = 1; i <= c.order; ++i) h = hash_tensor(c.gate(i, j), h);
    h = hash_tensor(target.site_tensors[static_cast<size_t>(j - 1)], h);
  }
  return h;
}

}  // namespace

ComplexTensor compute_environment(const MpsState& target,
                                  const SequentialCircuit& c, long layer,
                                  long bond, SweepCache* cache) {
  check_compat(target, c);
  const long n = c.n_sites, m = c.order;
  if (layer < 1 || layer > m || bond < 1 || bond > n - 1)
    throw DimensionError("gate (layer, bond) out of range");

  LT left, right;
  // Left boundary over columns 1..bond-1.
  if (cache) {
    if (cache->left_sum.size() != static_cast<size_t>(n)) {
      cache->left_sum.assign(static_cast<size_t>(n), 0);
      cache->right_sum.assign(static_cast<size_t>(n), 0);
      cache->left.assign(static_cast<size_t>(n), ComplexTensor({1}));
      cache->right.assign(static_cast<size_t>(n), ComplexTensor({1}));
    }
    long base = 0;
    for (long k = bond - 1; k >= 1; --k) {
      if (cache->left_sum[static_cast<size_t>(k)] != 0 &&
          cache->left_sum[static_cast<size_t>(k)] ==
              hash_span(target, c, 1, k)) {
        base = k;
        break;
      }
    }
    LT cur = base == 0
                 ? left_init(m)
                 : LT{cache->left[static_cast<size_t>(base)],
                      bound_labels(m, "a", "b")};
    for (long k = base + 1; k <= bond - 1; ++k) {
      cur = left_absorb(std::move(cur), c, target, k);
      cache->left[static_cast<size_t>(k)] = cur.t;
      cache->left_sum[static_cast<size_t>(k)] = hash_span(target, c, 1, k);
    }
    left = std::move(cur);
  } else {
    LT cur = left_init(m);
    for (long k = 1; k <= bond - 1; ++k)
      cur = left_absorb(std::move(cur), c, target, k);
    left = std::move(cur);
  }
  // Right boundary over columns bond+1..N.
  if (cache) {
    long base = n;  // n means nothing cached
    for (long k = bond; k <= n - 2; ++k) {
      if (cache->right_sum[static_cast<size_t>(k)] != 0 &&
          cache->right_sum[static_cast<size_t>(k)] ==
              hash_span(target, c, k + 1, n)) {
        base = k;
        break;
      }
    }
    LT cur = base == n
                 ? right_init(target, m)
                 : LT{cache->right[static_cast<size_t>(base)],
                      bound_labels(m, "A", "B")};
    for (long k = (base == n ? n - 2 : base - 1); k >= bond; --k) {
      cur = right_absorb(std::move(cur), c, target, k + 1);
      cache->right[static_cast<size_t>(k)] = cur.t;
      cache->right_sum[static_cast<size_t>(k)] = hash_span(target, c, k + 1, n);
    }
    right = std::move(cur);
  } else {
    LT cur = right_init(target, m);
    for (long k = n - 2; k >= bond; --k)
      cur = right_absorb(std::move(cur), c, target, k + 1);
    right = std::move(cur);
  }
  return environment_at(left, right, c, target, bond, layer);
}

cxd circuit_overlap(const MpsState& target, const SequentialCircuit& c) {
  check_compat(target, c);
  const long n = c.n_sites, m = c.order;
  LT cur = right_init(target, m);
  for (long j = n - 1; j >= 1; --j) cur = right_absorb(std::move(cur), c, target, j);
  LT l0 = left_init(m);
  std::vector<std::pair<std::string, std::string>> pairs{{"al", "al"}};
  for (long i = 1; i <= m; ++i) {
    pairs.emplace_back(nm("a", i), nm("A", i));
    pairs.emplace_back(nm("b", i), nm("B", i));
  }
  LT s = lt_contract(l0, cur, pairs);
  return s.t.data()[0];
}

namespace {

// Applies the rotation from u_old to u_opt raised to the power beta; the
// eigenbasis of the (normal) rotation makes the fractional power exact, and a
// final polar projection absorbs roundoff.
ComplexTensor relax_update(const ComplexTensor& u_old, const ComplexTensor& u_opt,
                           double beta) {
  const Eigen::MatrixXcd uo = u_old.as_matrix(1);
  const Eigen::MatrixXcd w = u_opt.as_matrix(1) * uo.adjoint();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(w);
  Eigen::VectorXcd lam = es.eigenvalues();
  for (long k = 0; k < lam.size(); ++k)
    lam(k) = std::exp(cxd(0.0, beta * std::arg(lam(k))));
  const Eigen::MatrixXcd wb =
      es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().inverse();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      wb * uo, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return ComplexTensor::from_matrix(svd.matrixU() * svd.matrixV().adjoint());
}

}  // namespace

std::pair<SequentialCircuit, SweepReport> maximize_overlap(
    const MpsState& target, SequentialCircuit init, const SweepConfig& cfg) {
  check_compat(target, init);
  if (cfg.max_iters < 1 || cfg.abs_tol <= 0 || cfg.rel_tol <= 0)
    throw DomainError("sweep tolerances must be positive");
  if (cfg.over_relax <= 0 || cfg.over_relax >= 2)
    throw DomainError("over_relax must lie in (0, 2)");
  SequentialCircuit c = std::move(init);
  const long n = c.n_sites, m = c.order;

  SweepReport rep;
  double eps_prev = std::numeric_limits<double>::infinity();
  std::vector<LT> right(static_cast<size_t>(n));

  for (long idx = 1; idx <= cfg.max_iters; ++idx) {
    double last_overlap = 0;
    for (long i = 1; i <= m; ++i) {
      // Right boundaries stay valid through one ascending pass of layer i.
      right[static_cast<size_t>(n - 1)] = right_init(target, m);
      for (long k = n - 2; k >= 1; --k)
        right[static_cast<size_t>(k)] =
            right_absorb(right[static_cast<size_t>(k + 1)], c, target, k + 1);
      LT left = left_init(m);
      for (long j = 1; j <= n - 1; ++j) {
        ComplexTensor e =
            environment_at(left, right[static_cast<size_t>(j)], c, target, j, i);
        ComplexTensor u = polar_unitary(e);
        if (cfg.over_relax != 1.0)
          u = relax_update(c.gate(i, j), u, cfg.over_relax);
        c.gate(i, j) = u;
        if (i == m && j == n - 1)
          last_overlap = std::abs((e.as_matrix(1) * u.as_matrix(1)).trace());
        left = left_absorb(std::move(left), c, target, j);
      }
    }
    const double fid = std::min(last_overlap * last_overlap, 1.0);
    const double eps = std::max(1.0 - fid, 0.0);
    rep.fidelity_trace.push_back(fid);
    rep.final_fidelity = fid;
    rep.iterations = idx;
    const double delta = std::isinf(eps_prev)
                             ? std::numeric_limits<double>::infinity()
                             : std::abs(eps - eps_prev) /
                                   std::max(std::abs(eps_prev), 1e-300);
    if (eps <= cfg.abs_tol) {
      rep.converged_by = StopReason::abs_tol;
      return {std::move(c), std::move(rep)};
    }
    if (delta <= cfg.rel_tol) {
      rep.converged_by = StopReason::rel_tol;
      return {std::move(c), std::move(rep)};
    }
    eps_prev = eps;
  }
  rep.converged_by = StopReason::max_iters;
  return {std::move(c), std::move(rep)};
}

// --- energy network <psi| lambda - H |psi> -------------------------------
// Same column scheme doubled: ket wires "p/q", bra (conjugated circuit)
// wires "P/Q", MPO bond "m" threaded between the physical legs.

namespace {

std::vector<std::string> en_labels(long m) {
  std::vector<std::string> l{"m"};
  for (long i = 1; i <= m; ++i) l.push_back(nm("p", i));
  for (long i = 1; i <= m; ++i) l.push_back(nm("q", i));
  for (long i = 1; i <= m; ++i) l.push_back(nm("P", i));
  for (long i = 1; i <= m; ++i) l.push_back(nm("Q", i));
  return l;
}

LT en_left_init(long m) {
  std::vector<long> shape{1};
  for (long i = 0; i < 4 * m; ++i) shape.push_back(2);
  ComplexTensor t(shape);
  for (long w = 0; w < (1L << (2 * m)); ++w) {
    std::vector<long> idx{0};
    for (long i = 0; i < m; ++i) idx.push_back((w >> i) & 1);
    for (long i = 0; i < m; ++i) idx.push_back((w >> i) & 1);
    for (long i = 0; i < m; ++i) idx.push_back((w >> (m + i)) & 1);
    for (long i = 0; i < m; ++i) idx.push_back((w >> (m + i)) & 1);
    t.at(idx) = 1.0;
  }
  return {std::move(t), en_labels(m)};
}

LT en_right_init(const std::vector<ComplexTensor>& mpo, long m) {
  const auto& w_n = mpo.back();  // {Dl, 1, s_out, s_in}
  const long dl = w_n.extent(0);
  std::vector<long> shape{dl};
  for (long i = 0; i < 4 * m; ++i) shape.push_back(2);
  ComplexTensor t(shape);
  for (long mb = 0; mb < dl; ++mb)
    for (long wk = 0; wk < (1L << m); ++wk)
      for (long wb = 0; wb < (1L << m); ++wb) {
        std::vector<long> idx{mb};
        for (long i = 0; i < m; ++i) idx.push_back((wk >> i) & 1);
        idx.push_back(0);
        for (long i = 0; i + 1 < m; ++i) idx.push_back((wk >> i) & 1);
        for (long i = 0; i < m; ++i) idx.push_back((wb >> i) & 1);
        idx.push_back(0);
        for (long i = 0; i + 1 < m; ++i) idx.push_back((wb >> i) & 1);
        t.at(idx) =
            w_n.at({mb, 0, (wb >> (m - 1)) & 1, (wk >> (m - 1)) & 1});
      }
  return {std::move(t), en_labels(m)};
}

// Absorbs ket gates, bra (conjugated) gates, and the MPO tensor of column j.
LT en_left_absorb(LT cur, const SequentialCircuit& c,
                  const std::vector<ComplexTensor>& mpo, long j) {
  const long m = c.order;
  cur = lt_contract(cur, e0_lt("x"), {{"q1", "x"}});
  cur = lt_contract(cur, e0_lt("x"), {{"Q1", "x"}});
  for (long i = 1; i <= m; ++i) {
    LT g = gate_lt(c.gate(i, j));
    if (i < m)
      cur = lt_contract(cur, g, {{nm("p", i), "bl"}, {nm("q", i + 1), "tl"}});
    else
      cur = lt_contract(cur, g, {{nm("p", m), "bl"}});
    rename(cur, "tr", nm("np", i));
    rename(cur, "br", nm("nq", i));
    if (i == m) rename(cur, "tl", "kph");
  }
  for (long i = 1; i <= m; ++i) {
    LT g = gate_lt(c.gate(i, j).conj());
    if (i < m)
      cur = lt_contract(cur, g, {{nm("P", i), "bl"}, {nm("Q", i + 1), "tl"}});
    else
      cur = lt_contract(cur, g, {{nm("P", m), "bl"}});
    rename(cur, "tr", nm("nP", i));
    rename(cur, "br", nm("nQ", i));
    if (i == m) rename(cur, "tl", "bph");
  }
  LT w = {mpo[static_cast<size_t>(j - 1)], {"wl", "wr", "so", "si"}};
  cur = lt_contract(cur, w, {{"m", "wl"}, {"kph", "si"}, {"bph", "so"}});
  rename(cur, "wr", "m");
  for (long i = 1; i <= m; ++i) {
    rename(cur, nm("np", i), nm("p", i));
    rename(cur, nm("nq", i), nm("q", i));
    rename(cur, nm("nP", i), nm("P", i));
    rename(cur, nm("nQ", i), nm("Q", i));
  }
  return reorder(cur, en_labels(m));
}

LT en_right_absorb(LT cur, const SequentialCircuit& c,
                   const std::vector<ComplexTensor>& mpo, long j) {
  const long m = c.order;
  for (long i = 1; i <= m; ++i) {
    LT g = gate_lt(c.gate(i, j));
    cur = lt_contract(cur, g, {{nm("p", i), "tr"}, {nm("q", i), "br"}});
    rename(cur, "bl", nm("np", i));
    if (i < m)
      rename(cur, "tl", nm("nq", i + 1));
    else
      rename(cur, "tl", "kph");
  }
  for (long i = 1; i <= m; ++i) {
    LT g = gate_lt(c.gate(i, j).conj());
    cur = lt_contract(cur, g, {{nm("P", i), "tr"}, {nm("Q", i), "br"}});
    rename(cur, "bl", nm("nP", i));
    if (i < m)
      rename(cur, "tl", nm("nQ", i + 1));
    else
      rename(cur, "tl", "bph");
  }
  LT w = {mpo[static_cast<size_t>(j - 1)], {"wl", "wr", "so", "si"}};
  cur = lt_contract(cur, w, {{"m", "wr"}, {"kph", "si"}, {"bph", "so"}});
  rename(cur, "wl", "m");
  cur = lt_contract(cur, e0_lt("nq1"), {});
  cur = lt_contract(cur, e0_lt("nQ1"), {});
  for (long i = 1; i <= m; ++i) {
    rename(cur, nm("np", i), nm("p", i));
    rename(cur, nm("nq", i), nm("q", i));
    rename(cur, nm("nP", i), nm("P", i));
    rename(cur, nm("nQ", i), nm("Q", i));
  }
  return reorder(cur, en_labels(m));
}

// Environment of the KET copy of gate (skip, j); the bra copy stays fixed.
ComplexTensor en_environment_at(const LT& left, const LT& right,
                                const SequentialCircuit& c,
                                const std::vector<ComplexTensor>& mpo, long j,
                                long skip) {
  const long m = c.order;
  LT cur = lt_contract(left, e0_lt("x"), {{"q1", "x"}});
  cur = lt_contract(cur, e0_lt("x"), {{"Q1", "x"}});
  for (long i = 1; i <= m; ++i) {
    if (i == skip) continue;
    LT g = gate_lt(c.gate(i, j));
    if (i < m)
      cur = lt_contract(cur, g, {{nm("p", i), "bl"}, {nm("q", i + 1), "tl"}});
    else
      cur = lt_contract(cur, g, {{nm("p", m), "bl"}});
    rename(cur, "tr", nm("np", i));
    rename(cur, "br", nm("nq", i));
    if (i == m) rename(cur, "tl", "kph");
  }
  for (long i = 1; i <= m; ++i) {
    LT g = gate_lt(c.gate(i, j).conj());
    if (i < m)
      cur = lt_contract(cur, g, {{nm("P", i), "bl"}, {nm("Q", i + 1), "tl"}});
    else
      cur = lt_contract(cur, g, {{nm("P", m), "bl"}});
    rename(cur, "tr", nm("nP", i));
    rename(cur, "br", nm("nQ", i));
    if (i == m) rename(cur, "tl", "bph");
  }
  LT w = {mpo[static_cast<size_t>(j - 1)], {"wl", "wr", "so", "si"}};
  if (skip == m)
    cur = lt_contract(cur, w, {{"m", "wl"}, {"bph", "so"}});
  else
    cur = lt_contract(cur, w, {{"m", "wl"}, {"kph", "si"}, {"bph", "so"}});
  // Disambiguate the open ket legs before the right boundary (which reuses
  // the p/q names) comes in.
  rename(cur, nm("p", skip), "Ebl");
  if (skip == m)
    rename(cur, "si", "Etl");
  else
    rename(cur, nm("q", skip + 1), "Etl");
  std::vector<std::pair<std::string, std::string>> pairs{{"wr", "m"}};
  for (long i = 1; i <= m; ++i) {
    if (i != skip) {
      pairs.emplace_back(nm("np", i), nm("p", i));
      pairs.emplace_back(nm("nq", i), nm("q", i));
    }
    pairs.emplace_back(nm("nP", i), nm("P", i));
    pairs.emplace_back(nm("nQ", i), nm("Q", i));
  }
  cur = lt_contract(cur, right, pairs);
  LT e = reorder(cur, {"Ebl", nm("q", skip), "Etl", nm("p", skip)});
  return e.t.reshape({4, 4});
}

}  // namespace

std::pair<SequentialCircuit, EnergyReport> minimize_energy(
    const IsingParams& p, SequentialCircuit init, const SweepConfig& cfg) {
  validate_circuit(init, 1e-10);
  if (p.n_sites != init.n_sites)
    throw DimensionError("Hamiltonian and circuit sizes differ");
  if (cfg.max_iters < 1 || cfg.abs_tol <= 0 || cfg.rel_tol <= 0)
    throw DomainError("sweep tolerances must be positive");
  SequentialCircuit c = std::move(init);
  const long n = c.n_sites, m = c.order;

  const double lambda = spectral_bound(p);
  std::vector<ComplexTensor> mpo_a = ising_mpo(p, -lambda);
  mpo_a.front() *= -1.0;  // lambda - H, positive semidefinite
  const auto mpo_h = ising_mpo(p);

  EnergyReport rep;
  double e_prev = std::numeric_limits<double>::infinity();
  std::vector<LT> right(static_cast<size_t>(n));

  for (long idx = 1; idx <= cfg.max_iters; ++idx) {
    for (long i = 1; i <= m; ++i) {
      right[static_cast<size_t>(n - 1)] = en_right_init(mpo_a, m);
      for (long k = n - 2; k >= 1; --k)
        right[static_cast<size_t>(k)] =
            en_right_absorb(right[static_cast<size_t>(k + 1)], c, mpo_a, k + 1);
      LT left = en_left_init(m);
      for (long j = 1; j <= n - 1; ++j) {
        ComplexTensor e = en_environment_at(
            left, right[static_cast<size_t>(j)], c, mpo_a, j, i);
        c.gate(i, j) = polar_unitary(e);
        left = en_left_absorb(std::move(left), c, mpo_a, j);
      }
    }
    const double energy =
        std::real(mpo_expectation(circuit_to_mps(c), mpo_h));
    rep.energy_trace.push_back(energy);
    rep.final_energy = energy;
    rep.iterations = idx;
    if (std::isfinite(e_prev)) {
      const double d = std::abs(energy - e_prev);
      if (d <= cfg.abs_tol) {
        rep.converged_by = StopReason::abs_tol;
        return {std::move(c), std::move(rep)};
      }
      if (d / std::max(std::abs(e_prev), 1e-300) <= cfg.rel_tol) {
        rep.converged_by = StopReason::rel_tol;
        return {std::move(c), std::move(rep)};
      }
    }
    e_prev = energy;
  }
  rep.converged_by = StopReason::max_iters;
  return {std::move(c), std::move(rep)};
}

}  // namespace cqc
