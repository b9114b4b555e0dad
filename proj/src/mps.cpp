#include "cqc/mps.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

namespace cqc {

namespace {

std::vector<double> normalized(std::vector<double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  if (s > 0)
    for (double& x : v) x /= s;
  return v;
}

ComplexTensor scale_left_bond(const ComplexTensor& b,
                              const std::vector<double>& lam) {
  ComplexTensor out = b;
  const long chi_l = b.extent(0);
  const long rest = b.size() / chi_l;
  for (long a = 0; a < chi_l; ++a)
    for (long k = 0; k < rest; ++k)
      out.data()[static_cast<size_t>(a * rest + k)] *= lam[static_cast<size_t>(a)];
  return out;
}

}  // namespace

long MpsState::max_bond_dim() const {
  long m = 1;
  for (const auto& t : site_tensors) m = std::max(m, t.extent(2));
  return m;
}

MpsState product_mps(const std::vector<Eigen::Vector2cd>& site_amplitudes) {
  MpsState s;
  for (const auto& amp : site_amplitudes) {
    Eigen::Vector2cd a = amp.normalized();
    ComplexTensor t({1, 2, 1});
    t.at({0, 0, 0}) = a(0);
    t.at({0, 1, 0}) = a(1);
    s.site_tensors.push_back(std::move(t));
  }
  s.bond_singulars.assign(site_amplitudes.size() - 1, {1.0});
  return s;
}

MpsState polarized_mps(long n_sites) {
  std::vector<Eigen::Vector2cd> amps(static_cast<size_t>(n_sites),
                                     Eigen::Vector2cd(1.0, 0.0));
  return product_mps(amps);
}

MpsState random_mps(long n_sites, long chi, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<ComplexTensor> tensors;
  auto profile = [&](long k) {
    return std::min({1L << std::min<long>(k, 30), 1L << std::min<long>(n_sites - k, 30), chi});
  };
  for (long k = 1; k <= n_sites; ++k) {
    ComplexTensor t({profile(k - 1), 2, profile(k)});
    for (auto& v : t.data()) v = cxd(gauss(rng), gauss(rng));
    tensors.push_back(std::move(t));
  }
  return canonicalize(std::move(tensors));
}

MpsState canonicalize(std::vector<ComplexTensor> tensors, double cutoff) {
  const long n = static_cast<long>(tensors.size());
  if (n == 0) throw DimensionError("empty MPS");
  // Left-to-right: make every tensor left canonical, pushing the remainder.
  for (long k = 0; k < n - 1; ++k) {
    auto& t = tensors[static_cast<size_t>(k)];
    SvdResult r = svd(t, 2, std::nullopt, cutoff);
    const long chi = static_cast<long>(r.singular_values.size());
    ComplexTensor left =
        r.left_isometry.reshape({t.extent(0), t.extent(1), chi});
    // carry = diag(S) * Y^dag
    Eigen::MatrixXcd y = r.right_isometry.as_matrix(1);
    Eigen::MatrixXcd carry =
        Eigen::Map<const Eigen::VectorXd>(r.singular_values.data(), chi)
            .cast<cxd>()
            .asDiagonal() *
        y.adjoint();
    tensors[static_cast<size_t>(k)] = std::move(left);
    tensors[static_cast<size_t>(k + 1)] =
        contract(ComplexTensor::from_matrix(carry),
                 tensors[static_cast<size_t>(k + 1)], {{1, 0}});
  }
  // Right-to-left: extract right canonical tensors and Schmidt values.
  MpsState out;
  out.site_tensors.resize(static_cast<size_t>(n));
  out.bond_singulars.resize(static_cast<size_t>(n - 1));
  for (long k = n - 1; k > 0; --k) {
    auto& t = tensors[static_cast<size_t>(k)];
    SvdResult r = svd(t, 1, std::nullopt, cutoff);
    const long chi = static_cast<long>(r.singular_values.size());
    // B_k = Y^dag reshaped {chi, 2, chi_r}
    Eigen::MatrixXcd bd = r.right_isometry.as_matrix(1).adjoint();
    out.site_tensors[static_cast<size_t>(k)] =
        ComplexTensor::from_matrix(bd).reshape({chi, t.extent(1), t.extent(2)});
    out.bond_singulars[static_cast<size_t>(k - 1)] =
        normalized(r.singular_values);
    Eigen::MatrixXcd carry =
        r.left_isometry.as_matrix(1) *
        Eigen::Map<const Eigen::VectorXd>(r.singular_values.data(), chi)
            .cast<cxd>()
            .asDiagonal();
    tensors[static_cast<size_t>(k - 1)] =
        contract(tensors[static_cast<size_t>(k - 1)],
                 ComplexTensor::from_matrix(carry), {{2, 0}});
  }
  ComplexTensor first = tensors[0];
  const double nrm = first.norm();
  if (nrm == 0) throw NumericalError("cannot normalize the zero state");
  first *= 1.0 / nrm;
  out.site_tensors[0] = first;
  return out;
}

cxd overlap(const MpsState& a, const MpsState& b) {
  if (a.n_sites() != b.n_sites()) throw DimensionError("MPS length mismatch");
  ComplexTensor env = ComplexTensor::identity(1);  // [bra, ket]
  for (long k = 0; k < a.n_sites(); ++k) {
    const auto& ta = a.site_tensors[static_cast<size_t>(k)];
    const auto& tb = b.site_tensors[static_cast<size_t>(k)];
    ComplexTensor tmp = contract(env, ta.conj(), {{0, 0}});  // [ket, s, bra']
    env = contract(tmp, tb, {{0, 0}, {1, 1}});               // [bra', ket']
  }
  return env.data()[0];
}

cxd local_expectation(const MpsState& state, long site, const ComplexTensor& op) {
  if (site < 1 || site > state.n_sites())
    throw DimensionError("site out of range");
  const auto& b = state.site_tensors[static_cast<size_t>(site - 1)];
  ComplexTensor t = (site == 1)
                        ? b
                        : scale_left_bond(
                              b, state.bond_singulars[static_cast<size_t>(site - 2)]);
  ComplexTensor ot = contract(op, t, {{1, 1}});  // [s', chi_l, chi_r]
  ComplexTensor val = contract(t.conj(), ot, {{1, 0}, {0, 1}, {2, 2}});
  return val.data()[0];
}

double entropy_at_bond(const MpsState& state, long bond) {
  if (bond < 1 || bond >= state.n_sites())
    throw DimensionError("bond out of range");
  double s = 0;
  for (double lam : state.bond_singulars[static_cast<size_t>(bond - 1)]) {
    const double p = lam * lam;
    if (p > 1e-300) s -= p * std::log(p);
  }
  return s;
}

double half_chain_entropy(const MpsState& state) {
  return entropy_at_bond(state, state.n_sites() / 2);
}

double apply_two_site_gate(MpsState& state, long bond, const ComplexTensor& gate,
                           std::optional<long> max_chi, double cutoff) {
  const long n = state.n_sites();
  if (bond < 1 || bond >= n) throw DimensionError("bond out of range");
  auto& bl = state.site_tensors[static_cast<size_t>(bond - 1)];
  auto& br = state.site_tensors[static_cast<size_t>(bond)];
  ComplexTensor g = gate.reshape({2, 2, 2, 2});  // [s', t', s, t]
  // phi: gate applied to B_j B_{j+1} (no left Schmidt factor).
  ComplexTensor pair = contract(bl, br, {{2, 0}});       // [a, s, t, c]
  ComplexTensor phi = contract(g, pair, {{2, 1}, {3, 2}});  // [s', t', a, c]
  phi = phi.transpose({2, 0, 1, 3});                       // [a, s', t', c]
  // theta: with the left Schmidt factor, for correct singular values.
  ComplexTensor theta =
      (bond == 1)
          ? phi
          : scale_left_bond(phi,
                            state.bond_singulars[static_cast<size_t>(bond - 2)]);
  SvdResult r = svd(theta, 2, max_chi, cutoff);
  const long chi = static_cast<long>(r.singular_values.size());
  double total = r.discarded_weight;
  for (double s : r.singular_values) total += s * s;
  const double err = (total > 0) ? r.discarded_weight / total : 0.0;

  Eigen::MatrixXcd bd = r.right_isometry.as_matrix(1).adjoint();
  ComplexTensor b_right =
      ComplexTensor::from_matrix(bd).reshape({chi, 2, phi.extent(3)});
  // Hastings-style left update: avoids dividing by small Schmidt values.
  ComplexTensor b_left = contract(phi, b_right.conj(), {{2, 1}, {3, 2}});
  // b_left currently [a, s', chi]; normalize via the new Schmidt vector.
  std::vector<double> lam = normalized(r.singular_values);
  double s2 = 0;
  for (double s : r.singular_values) s2 += s * s;
  const double scale = std::sqrt(s2);
  if (scale > 0) b_left *= 1.0 / scale;
  state.bond_singulars[static_cast<size_t>(bond - 1)] = std::move(lam);
  bl = std::move(b_left);
  br = std::move(b_right);
  return err;
}

TebdResult tebd_evolve(const MpsState& state, const TrotterStep& step,
                       std::optional<long> max_chi, double cutoff) {
  TebdResult res;
  res.state = state;
  for (const auto& [bond, gate] : step.gates)
    res.truncation_error +=
        apply_two_site_gate(res.state, bond, gate, max_chi, cutoff);
  if (step.kind == TrotterKind::imaginary_time_nonunitary) {
    // Non-unitary gates degrade the canonical form; rebuild it.
    res.state = canonicalize(std::move(res.state.site_tensors), cutoff);
  }
  return res;
}

cxd mpo_expectation(const MpsState& state, const std::vector<ComplexTensor>& mpo) {
  if (static_cast<long>(mpo.size()) != state.n_sites())
    throw DimensionError("MPO length mismatch");
  ComplexTensor env({1, 1, 1});  // [bra, m, ket]
  env.data()[0] = 1.0;
  for (long k = 0; k < state.n_sites(); ++k) {
    const auto& b = state.site_tensors[static_cast<size_t>(k)];
    const auto& w = mpo[static_cast<size_t>(k)];  // [Dl, Dr, s_out, s_in]
    ComplexTensor t = contract(env, b.conj(), {{0, 0}});  // [m, ket, s_out, bra']
    t = contract(t, w, {{0, 0}, {2, 2}});                 // [ket, bra', Dr, s_in]
    env = contract(t, b, {{0, 0}, {3, 1}});               // [bra', Dr, ket']
    env = env.transpose({0, 1, 2});
  }
  return env.data()[0];
}

namespace {

// Lanczos ground state of the two-site effective Hamiltonian given as a
// matvec closure; dim is small so full reorthogonalization is cheap.
template <typename MatVec>
double lanczos_ground(const MatVec& hv, Eigen::VectorXcd& v, long max_iter,
                      double tol) {
  const long dim = v.size();
  max_iter = std::min(max_iter, dim);
  std::vector<Eigen::VectorXcd> basis;
  std::vector<double> alpha, beta;
  v.normalize();
  basis.push_back(v);
  Eigen::VectorXcd w;
  double e_prev = 1e300;
  for (long it = 0; it < max_iter; ++it) {
    w = hv(basis.back());
    double a = std::real(basis.back().dot(w));
    alpha.push_back(a);
    for (const auto& u : basis) w -= u.dot(w) * u;
    for (const auto& u : basis) w -= u.dot(w) * u;
    // Tridiagonal eigenproblem.
    const long m = static_cast<long>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (long i = 0; i < m; ++i) {
      tri(i, i) = alpha[static_cast<size_t>(i)];
      if (i + 1 < m) {
        tri(i, i + 1) = beta[static_cast<size_t>(i)];
        tri(i + 1, i) = beta[static_cast<size_t>(i)];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const double e0 = es.eigenvalues()(0);
    const double b = w.norm();
    if (std::abs(e0 - e_prev) < tol || b < 1e-14 || it == max_iter - 1) {
      Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
      for (long i = 0; i < m; ++i)
        out += es.eigenvectors()(i, 0) * basis[static_cast<size_t>(i)];
      out.normalize();
      v = out;
      return e0;
    }
    e_prev = e0;
    beta.push_back(b);
    basis.push_back(w / b);
  }
  return e_prev;
}

}  // namespace

DmrgResult dmrg_ground_state(const IsingParams& p, long chi,
                             const DmrgOptions& opts) {
  if (chi < 1) throw DimensionError("chi must be positive");
  const long n = p.n_sites;
  auto mpo = ising_mpo(p);
  std::mt19937_64 rng(0x5eed);
  // Mixed-canonical work chain: left of the active pair left-canonical,
  // right of it right-canonical.
  std::vector<ComplexTensor> tensors =
      random_mps(n, std::max<long>(chi, 2), rng).site_tensors;

  // left_env[k]: sites < k contracted; right_env[k]: sites > k contracted.
  std::vector<ComplexTensor> left_env(static_cast<size_t>(n + 2));
  std::vector<ComplexTensor> right_env(static_cast<size_t>(n + 2));
  ComplexTensor triv({1, 1, 1});
  triv.data()[0] = 1.0;
  left_env[1] = triv;
  right_env[static_cast<size_t>(n)] = triv;

  auto absorb_left = [&](long k) {  // extend left_env over site k
    const auto& b = tensors[static_cast<size_t>(k - 1)];
    const auto& w = mpo[static_cast<size_t>(k - 1)];
    ComplexTensor t = contract(left_env[static_cast<size_t>(k)], b.conj(), {{0, 0}});
    t = contract(t, w, {{0, 0}, {2, 2}});
    left_env[static_cast<size_t>(k + 1)] = contract(t, b, {{0, 0}, {3, 1}});
  };
  auto absorb_right = [&](long k) {  // extend right_env over site k
    const auto& b = tensors[static_cast<size_t>(k - 1)];
    const auto& w = mpo[static_cast<size_t>(k - 1)];
    ComplexTensor t = contract(b.conj(), right_env[static_cast<size_t>(k)], {{2, 0}});
    t = contract(t, w, {{1, 2}, {2, 1}});  // [bra_l, ket, Dl, s_in]
    right_env[static_cast<size_t>(k - 1)] = contract(t, b, {{1, 2}, {3, 1}});
  };
  for (long k = n; k >= 2; --k) absorb_right(k);

  double energy = 0, e_prev = 1e300;
  long sweep = 0;
  for (; sweep < opts.max_sweeps; ++sweep) {
    // going_right: after the solve the left factor stays as an isometry and
    // the weight moves into site k+1 (and mirrored when sweeping back).
    auto optimize_pair = [&](long k, bool going_right) {
      const auto& le = left_env[static_cast<size_t>(k)];
      const auto& re = right_env[static_cast<size_t>(k + 1)];
      const auto& wl = mpo[static_cast<size_t>(k - 1)];
      const auto& wr = mpo[static_cast<size_t>(k)];
      const long dl = le.extent(2), dr = re.extent(2);
      auto& bl = tensors[static_cast<size_t>(k - 1)];
      auto& br = tensors[static_cast<size_t>(k)];
      ComplexTensor v0 = contract(bl, br, {{2, 0}});  // [a, s, t, c]
      Eigen::VectorXcd v = Eigen::Map<Eigen::VectorXcd>(
          v0.data().data(), static_cast<long>(v0.data().size()));
      auto hv = [&](const Eigen::VectorXcd& x) {
        ComplexTensor xt({dl, 2, 2, dr});
        std::copy(x.data(), x.data() + x.size(), xt.data().begin());
        ComplexTensor t = contract(le, xt, {{2, 0}});  // [bra, m, s, t, c]
        t = contract(t, wl, {{1, 0}, {2, 3}});         // [bra, t, c, Dr, s']
        t = contract(t, wr, {{3, 0}, {1, 3}});         // [bra, c, s', Dr', t']
        t = contract(t, re, {{1, 2}, {3, 1}});         // [bra, s', t', bra_r]
        Eigen::VectorXcd y(x.size());
        std::copy(t.data().begin(), t.data().end(), y.data());
        return y;
      };
      const double e = lanczos_ground(hv, v, 200, 1e-14);
      ComplexTensor theta({dl, 2, 2, dr});
      std::copy(v.data(), v.data() + v.size(), theta.data().begin());
      SvdResult r = svd(theta, 2, chi, kSvdCutoff);
      const long m = static_cast<long>(r.singular_values.size());
      std::vector<double> lam = normalized(r.singular_values);
      Eigen::MatrixXcd x = r.left_isometry.as_matrix(1);
      Eigen::MatrixXcd yd = r.right_isometry.as_matrix(1).adjoint();
      Eigen::VectorXcd sv =
          Eigen::Map<const Eigen::VectorXd>(lam.data(), m).cast<cxd>();
      if (going_right) {
        bl = ComplexTensor::from_matrix(x).reshape({dl, 2, m});
        br = ComplexTensor::from_matrix(sv.asDiagonal() * yd)
                 .reshape({m, 2, dr});
      } else {
        bl = ComplexTensor::from_matrix(x * sv.asDiagonal())
                 .reshape({dl, 2, m});
        br = ComplexTensor::from_matrix(yd).reshape({m, 2, dr});
      }
      return e;
    };
    for (long k = 1; k <= n - 1; ++k) {
      energy = optimize_pair(k, true);
      absorb_left(k);
    }
    for (long k = n - 1; k >= 1; --k) {
      energy = optimize_pair(k, false);
      absorb_right(k + 1);
    }
    if (std::abs(energy - e_prev) < opts.energy_tol) break;
    e_prev = energy;
  }

  // One-site refinement: the two-site sweep truncates after each local solve
  // and stalls slightly above the fixed-chi variational optimum; single-site
  // updates converge to it exactly.
  auto optimize_site = [&](long k) {
    const auto& le = left_env[static_cast<size_t>(k)];
    const auto& re = right_env[static_cast<size_t>(k)];
    const auto& w = mpo[static_cast<size_t>(k - 1)];
    const long dl = le.extent(2), dr = re.extent(2);
    auto& b = tensors[static_cast<size_t>(k - 1)];
    Eigen::VectorXcd v = Eigen::Map<Eigen::VectorXcd>(
        b.data().data(), static_cast<long>(b.data().size()));
    auto hv = [&](const Eigen::VectorXcd& x) {
      ComplexTensor xt({dl, 2, dr});
      std::copy(x.data(), x.data() + x.size(), xt.data().begin());
      ComplexTensor t = contract(le, xt, {{2, 0}});  // [bra, m, s, dr]
      t = contract(t, w, {{1, 0}, {2, 3}});          // [bra, dr, Dr, s']
      t = contract(t, re, {{1, 2}, {2, 1}});         // [bra, s', bra_r]
      Eigen::VectorXcd y(x.size());
      std::copy(t.data().begin(), t.data().end(), y.data());
      return y;
    };
    const double e = lanczos_ground(hv, v, 200, 1e-14);
    v /= v.norm();
    std::copy(v.data(), v.data() + v.size(), b.data().begin());
    return e;
  };
  e_prev = 1e300;
  for (long round = 0; round < opts.max_sweeps; ++round) {
    double energy1 = 0;
    for (long k = 1; k <= n - 1; ++k) {
      optimize_site(k);
      auto& b = tensors[static_cast<size_t>(k - 1)];
      const long dl = b.extent(0), dr = b.extent(2);
      Eigen::MatrixXcd m2 = b.as_matrix(2);  // (dl*2) x dr
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m2);
      const long r = std::min(m2.rows(), m2.cols());
      Eigen::MatrixXcd q = qr.householderQ() *
                           Eigen::MatrixXcd::Identity(m2.rows(), r);
      Eigen::MatrixXcd rr =
          q.adjoint() * m2;  // r x dr, numerically clean carry
      b = ComplexTensor::from_matrix(q).reshape({dl, 2, r});
      auto& nb = tensors[static_cast<size_t>(k)];
      nb = contract(ComplexTensor::from_matrix(rr), nb, {{1, 0}});
      absorb_left(k);
    }
    for (long k = n; k >= 2; --k) {
      energy1 = optimize_site(k);
      auto& b = tensors[static_cast<size_t>(k - 1)];
      const long dl = b.extent(0), dr = b.extent(2);
      Eigen::MatrixXcd m2 = b.as_matrix(1);  // dl x (2*dr)
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m2.adjoint());
      const long r = std::min(m2.rows(), m2.cols());
      Eigen::MatrixXcd q = qr.householderQ() *
                           Eigen::MatrixXcd::Identity(m2.cols(), r);
      Eigen::MatrixXcd ll = m2 * q;  // dl x r
      b = ComplexTensor::from_matrix(q.adjoint()).reshape({r, 2, dr});
      auto& pb = tensors[static_cast<size_t>(k - 2)];
      pb = contract(pb, ComplexTensor::from_matrix(ll), {{2, 0}});
      absorb_right(k);
    }
    if (std::abs(energy1 - e_prev) < opts.energy_tol) break;
    e_prev = energy1;
  }

  MpsState out = canonicalize(std::move(tensors));
  const double var_energy = std::real(mpo_expectation(out, mpo));
  if (sweep >= opts.max_sweeps)
    throw ConvergenceError("DMRG did not converge", var_energy);
  return {std::move(out), var_energy, sweep + 1};
}

Eigen::VectorXcd mps_to_statevector(const MpsState& state, long max_sites) {
  const long n = state.n_sites();
  if (n > max_sites)
    throw ResourceError("statevector requested beyond size cap");
  ComplexTensor acc = state.site_tensors[0];  // [1, s1, chi]
  acc = acc.reshape({2, acc.extent(2)});
  for (long k = 1; k < n; ++k) {
    acc = contract(acc, state.site_tensors[static_cast<size_t>(k)], {{1, 0}});
    acc = acc.reshape({acc.extent(0) * 2, acc.extent(2)});
  }
  Eigen::VectorXcd v(1L << n);
  for (long i = 0; i < v.size(); ++i) v(i) = acc.data()[static_cast<size_t>(i)];
  return v;
}

void save_mps(const MpsState& state, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path + " for writing");
  f.write("CQCMPS01", 8);
  auto w64 = [&](int64_t x) { f.write(reinterpret_cast<const char*>(&x), 8); };
  w64(state.n_sites());
  for (const auto& t : state.site_tensors) {
    w64(t.extent(0));
    w64(t.extent(2));
    f.write(reinterpret_cast<const char*>(t.data().data()),
            static_cast<std::streamsize>(t.data().size() * sizeof(cxd)));
  }
  for (const auto& lam : state.bond_singulars) {
    w64(static_cast<int64_t>(lam.size()));
    f.write(reinterpret_cast<const char*>(lam.data()),
            static_cast<std::streamsize>(lam.size() * sizeof(double)));
  }
}

MpsState load_mps(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::string(magic, 8) != "CQCMPS01")
    throw ParseError("not an MPS container: " + path);
  auto r64 = [&]() {
    int64_t x;
    f.read(reinterpret_cast<char*>(&x), 8);
    if (!f) throw ParseError("truncated MPS container: " + path);
    return x;
  };
  const long n = r64();
  if (n < 1 || n > 4096) throw ParseError("bad site count in " + path);
  MpsState s;
  for (long k = 0; k < n; ++k) {
    const long cl = r64(), cr = r64();
    ComplexTensor t({cl, 2, cr});
    f.read(reinterpret_cast<char*>(t.data().data()),
           static_cast<std::streamsize>(t.data().size() * sizeof(cxd)));
    if (!f) throw ParseError("truncated MPS container: " + path);
    s.site_tensors.push_back(std::move(t));
  }
  for (long k = 0; k < n - 1; ++k) {
    const long len = r64();
    std::vector<double> lam(static_cast<size_t>(len));
    f.read(reinterpret_cast<char*>(lam.data()),
           static_cast<std::streamsize>(lam.size() * sizeof(double)));
    if (!f) throw ParseError("truncated MPS container: " + path);
    s.bond_singulars.push_back(std::move(lam));
  }
  return s;
}

}  // namespace cqc
