#include "cqc/circuit.hpp"

#include <algorithm>
#include <cmath>

namespace cqc {

namespace {

long gate_index(const SequentialCircuit& c, long layer, long bond) {
  if (layer < 1 || layer > c.order || bond < 1 || bond > c.n_bonds())
    throw DimensionError("gate (layer, bond) out of range");
  return (layer - 1) * c.n_bonds() + (bond - 1);
}

}  // namespace

const ComplexTensor& SequentialCircuit::gate(long layer, long bond) const {
  return gates[static_cast<size_t>(gate_index(*this, layer, bond))];
}

ComplexTensor& SequentialCircuit::gate(long layer, long bond) {
  return gates[static_cast<size_t>(gate_index(*this, layer, bond))];
}

SequentialCircuit identity_circuit(long n_sites, long order) {
  if (n_sites < 2 || order < 1)
    throw DimensionError("need N >= 2 and M >= 1");
  SequentialCircuit c;
  c.n_sites = n_sites;
  c.order = order;
  c.gates.assign(static_cast<size_t>(order * (n_sites - 1)),
                 ComplexTensor::identity(4));
  return c;
}

SequentialCircuit near_identity_circuit(long n_sites, long order, double angle,
                                        std::mt19937_64& rng) {
  SequentialCircuit c = identity_circuit(n_sites, order);
  std::normal_distribution<double> dist;
  for (auto& g : c.gates) {
    Eigen::MatrixXcd h(4, 4);
    for (long i = 0; i < 4; ++i)
      for (long j = 0; j < 4; ++j) h(i, j) = cxd(dist(rng), dist(rng));
    h = (h + h.adjoint()).eval();
    h /= h.norm();
    g = hermitian_exp(ComplexTensor::from_matrix(h), cxd(0, -angle));
  }
  return c;
}

SequentialCircuit product_state_circuit(
    const std::vector<Eigen::Vector2cd>& site_amplitudes) {
  const long n = static_cast<long>(site_amplitudes.size());
  if (n < 2) throw DimensionError("need at least two sites");
  auto rot = [&](long k) {  // 2x2 unitary with |phi_k> in the first column
    Eigen::Vector2cd v = site_amplitudes[static_cast<size_t>(k - 1)];
    const double nrm = v.norm();
    if (nrm < 1e-14) throw DomainError("zero site amplitude");
    v /= nrm;
    Eigen::Matrix2cd u;
    u.col(0) = v;
    u.col(1) << -std::conj(v(1)), std::conj(v(0));
    return u;
  };
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  SequentialCircuit c = identity_circuit(n, 1);
  auto kron4 = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::MatrixXcd m(4, 4);
    for (long i = 0; i < 2; ++i)
      for (long j = 0; j < 2; ++j) m.block(i * 2, j * 2, 2, 2) = a(i, j) * b;
    return m;
  };
  // Gate j rotates qubit j; qubit N rides along on the last gate.
  for (long j = 1; j <= n - 1; ++j) {
    Eigen::Matrix2cd right = (j == n - 1) ? rot(n) : id;
    c.gate(1, j) = ComplexTensor::from_matrix(kron4(rot(j), right));
  }
  return c;
}

double unitarity_defect(const SequentialCircuit& c) {
  double worst = 0;
  for (const auto& g : c.gates) {
    if (g.rank() != 2 || g.extent(0) != 4 || g.extent(1) != 4)
      throw DimensionError("gates must be 4x4");
    Eigen::MatrixXcd m = g.as_matrix(1);
    worst = std::max(
        worst, (m.adjoint() * m - Eigen::MatrixXcd::Identity(4, 4)).norm());
  }
  return worst;
}

void validate_circuit(const SequentialCircuit& c, double tol) {
  if (c.n_sites < 2 || c.order < 1)
    throw DimensionError("need N >= 2 and M >= 1");
  if (static_cast<long>(c.gates.size()) != c.order * c.n_bonds())
    throw DimensionError("gate count does not match N, M");
  if (unitarity_defect(c) > tol)
    throw DomainError("circuit contains a non-unitary gate");
}

MpsState circuit_to_mps(const SequentialCircuit& c, double cutoff) {
  validate_circuit(c);
  const long chi_max = 1L << std::min<long>(c.order, 40);
  MpsState s = polarized_mps(c.n_sites);
  for (long i = 1; i <= c.order; ++i)
    for (long j = 1; j <= c.n_bonds(); ++j)
      apply_two_site_gate(s, j, c.gate(i, j), chi_max, cutoff);
  return s;
}

Eigen::VectorXcd circuit_to_statevector(const SequentialCircuit& c,
                                        long max_sites) {
  validate_circuit(c);
  if (c.n_sites > max_sites)
    throw ResourceError("statevector requested beyond size cap");
  const long n = c.n_sites;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(1L << n);
  psi(0) = 1.0;
  for (long i = 1; i <= c.order; ++i) {
    for (long j = 1; j <= c.n_bonds(); ++j) {
      Eigen::MatrixXcd g = c.gate(i, j).as_matrix(1);
      Eigen::VectorXcd next = Eigen::VectorXcd::Zero(psi.size());
      const long shift = n - j - 1;  // bit of qubit j+1
      for (long x = 0; x < psi.size(); ++x) {
        const long pair = (x >> shift) & 3;
        const long base = x & ~(3L << shift);
        for (long q = 0; q < 4; ++q)
          next(base | (q << shift)) += g(q, pair) * psi(x);
      }
      psi = std::move(next);
    }
  }
  return psi;
}

long circuit_depth_formula(long n_sites, long order) {
  return 2 * (order - 1) + n_sites - 1;
}

long circuit_depth(const SequentialCircuit& c) {
  validate_circuit(c, 1e30);  // shape only
  std::vector<long> free_at(static_cast<size_t>(c.n_sites + 1), 0);
  long depth = 0;
  for (long i = 1; i <= c.order; ++i)
    for (long j = 1; j <= c.n_bonds(); ++j) {
      const long t = std::max(free_at[static_cast<size_t>(j)],
                              free_at[static_cast<size_t>(j + 1)]) +
                     1;
      free_at[static_cast<size_t>(j)] = t;
      free_at[static_cast<size_t>(j + 1)] = t;
      depth = std::max(depth, t);
    }
  return depth;
}

ParamCount count_parameters(long n_sites, long order) {
  if (n_sites < 2 || order < 1)
    throw DimensionError("need N >= 2 and M >= 1");
  ParamCount pc;
  for (long i = 1; i <= order; ++i)
    for (long j = 1; j <= n_sites - 1; ++j) {
      long k;
      if (i > 1)
        k = 16;  // generic two-site unitary
      else if (j == 1)
        k = 7;  // only the |00> column matters
      else
        k = 12;  // isometry from the fresh |0> input
      pc.per_gate.push_back(k);
      pc.total += k;
    }
  return pc;
}

std::vector<long> mps_bond_profile(long n_sites, long chi) {
  if (n_sites < 2 || chi < 1) throw DimensionError("invalid profile request");
  std::vector<long> prof;
  for (long k = 1; k <= n_sites - 1; ++k) {
    long d = chi;
    if (k < 40) d = std::min(d, 1L << k);
    if (n_sites - k < 40) d = std::min(d, 1L << (n_sites - k));
    prof.push_back(d);
  }
  return prof;
}

long count_parameters_mps(const std::vector<long>& interior_profile) {
  const long n = static_cast<long>(interior_profile.size()) + 1;
  if (n < 2) throw DimensionError("need at least two sites");
  auto chi = [&](long k) {  // k = 0..n
    if (k <= 0 || k >= n) return 1L;
    return interior_profile[static_cast<size_t>(k - 1)];
  };
  long total = 0;
  for (long k = 1; k <= n; ++k) {
    const long p = chi(k - 1);        // input bond
    const long m = 2 * chi(k);        // physical x output bond
    if (p > m) throw DomainError("bond profile is not realizable");
    total += 2 * m * p - p * p;
  }
  for (long k = 1; k <= n - 1; ++k) total -= chi(k) * chi(k);
  return total;
}

long count_parameters_mps(long n_sites, long chi) {
  return count_parameters_mps(mps_bond_profile(n_sites, chi));
}

Eigen::VectorXcd multi_circuit_to_statevector(const MultiSiteCircuit& c,
                                              long max_sites) {
  if (c.n_sites < 1) throw DimensionError("empty circuit");
  if (c.n_sites > max_sites)
    throw ResourceError("statevector requested beyond size cap");
  const long n = c.n_sites;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(1L << n);
  psi(0) = 1.0;
  for (const auto& g : c.gates) {
    const long w = g.n_qubits;
    if (g.first_qubit < 1 || g.first_qubit + w - 1 > n)
      throw DimensionError("gate window out of range");
    const long d = 1L << w;
    if (g.unitary.rank() != 2 || g.unitary.extent(0) != d ||
        g.unitary.extent(1) != d)
      throw DimensionError("gate size does not match its window");
    Eigen::MatrixXcd u = g.unitary.as_matrix(1);
    const long shift = n - (g.first_qubit + w - 1);
    const long mask = (d - 1) << shift;
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(psi.size());
    for (long x = 0; x < psi.size(); ++x) {
      const long in = (x >> shift) & (d - 1);
      const long base = x & ~mask;
      for (long q = 0; q < d; ++q)
        next(base | (q << shift)) += u(q, in) * psi(x);
    }
    psi = std::move(next);
  }
  return psi;
}

namespace {

long ceil_pow2(long x) {
  long p = 1;
  while (p < x) p <<= 1;
  return p;
}

long log2_exact(long x) {
  long s = 0;
  while ((1L << s) < x) ++s;
  return s;
}

// Unitary with the given columns pinned; the rest completed from random data
// via QR, retrying on unlucky (rank-deficient) draws.
Eigen::MatrixXcd complete_columns(
    long dim, const std::vector<std::pair<long, Eigen::VectorXcd>>& pinned,
    std::mt19937_64& rng) {
  std::vector<long> order;
  std::vector<bool> used(static_cast<size_t>(dim), false);
  for (const auto& [idx, v] : pinned) {
    order.push_back(idx);
    used[static_cast<size_t>(idx)] = true;
  }
  for (long i = 0; i < dim; ++i)
    if (!used[static_cast<size_t>(i)]) order.push_back(i);

  std::normal_distribution<double> dist;
  for (int attempt = 0; attempt < 20; ++attempt) {
    Eigen::MatrixXcd m(dim, dim);
    for (size_t k = 0; k < pinned.size(); ++k)
      m.col(static_cast<long>(k)) = pinned[k].second;
    for (long k = static_cast<long>(pinned.size()); k < dim; ++k)
      for (long r = 0; r < dim; ++r) m(r, k) = cxd(dist(rng), dist(rng));
    try {
      Eigen::MatrixXcd q = qr_complete(m);
      Eigen::MatrixXcd out(dim, dim);
      for (long k = 0; k < dim; ++k)
        out.col(order[static_cast<size_t>(k)]) = q.col(k);
      return out;
    } catch (const NumericalError&) {
      // degenerate fill; draw again
    }
  }
  throw NumericalError("failed to complete unitary columns");
}

}  // namespace

MultiSiteCircuit mps_to_circuit_exact(const MpsState& state,
                                      std::mt19937_64& rng) {
  const long n = state.n_sites();
  if (n < 1) throw DimensionError("empty state");
  const long chi_cap = ceil_pow2(state.max_bond_dim());

  // Padded bond widths (qubits needed for the bond register).
  std::vector<long> pad(static_cast<size_t>(n + 1), 1);
  for (long k = 1; k <= n - 1; ++k) {
    long d = chi_cap;
    if (k < 40) d = std::min(d, 1L << k);
    if (n - k < 40) d = std::min(d, 1L << (n - k));
    pad[static_cast<size_t>(k)] = d;
  }

  MultiSiteCircuit out;
  out.n_sites = n;
  for (long k = 1; k <= n; ++k) {
    const long p_in = pad[static_cast<size_t>(k - 1)];
    const long p_out = pad[static_cast<size_t>(k)];
    const long s_in = log2_exact(p_in);
    const long s_out = log2_exact(p_out);
    const long width = s_out + 1;
    const long dim = 1L << width;
    const auto& b = state.site_tensors[static_cast<size_t>(k - 1)];
    const long chi_l = b.extent(0), chi_r = b.extent(2);

    // Columns carrying a populated bond state |alpha> on the first s_in
    // qubits of the window; image = B zero-padded on the output bond.
    std::vector<std::pair<long, Eigen::VectorXcd>> pinned;
    for (long a = 0; a < chi_l; ++a) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
      for (long s = 0; s < 2; ++s)
        for (long r = 0; r < chi_r; ++r)
          v(s * p_out + r) = b.at({a, s, r});
      pinned.emplace_back(a << (width - s_in), v);
    }
    MultiSiteGate g;
    g.first_qubit = k;
    g.n_qubits = width;
    g.unitary =
        ComplexTensor::from_matrix(complete_columns(dim, pinned, rng));
    out.gates.push_back(std::move(g));
  }
  return out;
}

MultiSiteCircuit mps_to_circuit_exact(const MpsState& state,
                                      unsigned long long seed) {
  std::mt19937_64 rng(seed);
  return mps_to_circuit_exact(state, rng);
}

SequentialCircuit as_order1_sequential(const MultiSiteCircuit& c) {
  const long n = c.n_sites;
  if (n < 2 || static_cast<long>(c.gates.size()) != n)
    throw DimensionError("expected one window per site");
  SequentialCircuit out = identity_circuit(n, 1);
  auto embed = [&](const MultiSiteGate& g) {  // width 1 or 2 -> 4x4 on (k,k+1)
    if (g.n_qubits == 2) return g.unitary.as_matrix(1);
    if (g.n_qubits != 1)
      throw DomainError("window too wide for an order-1 circuit");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    Eigen::MatrixXcd u = g.unitary.as_matrix(1);
    for (long s = 0; s < 2; ++s)
      for (long t = 0; t < 2; ++t) {
        m(2 * s, 2 * t) = u(s, t);
        m(2 * s + 1, 2 * t + 1) = u(s, t);
      }
    return m;
  };
  for (long k = 1; k <= n - 1; ++k) {
    const auto& g = c.gates[static_cast<size_t>(k - 1)];
    if (g.first_qubit != k) throw DimensionError("unexpected window position");
    out.gate(1, k) = ComplexTensor::from_matrix(embed(g));
  }
  // Trailing single-qubit gate folds into the last two-site gate.
  const auto& last = c.gates[static_cast<size_t>(n - 1)];
  if (last.n_qubits != 1 || last.first_qubit != n)
    throw DimensionError("unexpected final window");
  Eigen::MatrixXcd u = last.unitary.as_matrix(1);
  Eigen::MatrixXcd lift = Eigen::MatrixXcd::Zero(4, 4);
  lift.block(0, 0, 2, 2) = u;
  lift.block(2, 2, 2, 2) = u;
  out.gate(1, n - 1) = ComplexTensor::from_matrix(
      lift * out.gate(1, n - 1).as_matrix(1));
  return out;
}

}  // namespace cqc
