#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cqc/model.hpp"
#include "oracles.hpp"

using namespace cqc;

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// H written out term by term, independent of the bond grouping.
Eigen::MatrixXcd literal_hamiltonian(const IsingParams& p) {
  const long n = p.n_sites;
  const long dim = 1L << n;
  auto one_site = [&](long site, const Eigen::Matrix2cd& op) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (long k = 1; k <= n; ++k)
      m = kron(m, k == site ? Eigen::MatrixXcd(op)
                            : Eigen::MatrixXcd(Eigen::Matrix2cd::Identity()));
    return m;
  };
  Eigen::Matrix2cd sx = pauli_x().as_matrix(1);
  Eigen::Matrix2cd sz = pauli_z().as_matrix(1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (long j = 1; j < n; ++j) h += one_site(j, sx) * one_site(j + 1, sx);
  for (long j = 1; j <= n; ++j)
    h += p.transverse * one_site(j, sz) + p.longitudinal * one_site(j, sx);
  return -p.coupling * h;
}

Eigen::MatrixXcd mpo_to_dense(const std::vector<ComplexTensor>& mpo) {
  // Contract the MPO chain into a full operator; site 1 most significant.
  ComplexTensor acc = mpo[0];  // {1, Dr, s, t}
  for (size_t k = 1; k < mpo.size(); ++k) {
    // acc {1, D, 2^k, 2^k} x w {D, Dr, 2, 2}
    ComplexTensor t = contract(acc, mpo[k], {{1, 0}});  // {1, s, t, Dr, 2, 2}
    acc = t.transpose({0, 3, 1, 4, 2, 5})
              .reshape({1, t.extent(3), t.extent(1) * 2, t.extent(2) * 2});
  }
  return acc.reshape({acc.extent(2), acc.extent(3)}).as_matrix(1);
}

}  // namespace

TEST_CASE("pauli matrices") {
  Eigen::MatrixXcd x = pauli_x().as_matrix(1);
  Eigen::MatrixXcd y = pauli_y().as_matrix(1);
  Eigen::MatrixXcd z = pauli_z().as_matrix(1);
  CHECK((x * y - cxd(0, 1) * z).norm() < 1e-15);
  CHECK((x * x - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("bond terms sum to the full Hamiltonian") {
  IsingParams p{5, 1.3, 0.9, 0.35};
  Eigen::MatrixXcd want = literal_hamiltonian(p);
  Eigen::MatrixXcd got = dense_hamiltonian(p);
  CHECK((want - got).norm() < 1e-12);
}

TEST_CASE("bond term hermiticity and edge weights") {
  IsingParams p{4, 1.0, 0.7, 0.2};
  for (long j = 1; j <= 3; ++j) {
    Eigen::MatrixXcd h = bond_hamiltonian(p, j).as_matrix(1);
    CHECK((h - h.adjoint()).norm() < 1e-14);
  }
  CHECK_THROWS_AS(bond_hamiltonian(p, 0), DimensionError);
  CHECK_THROWS_AS(bond_hamiltonian(p, 4), DimensionError);
}

TEST_CASE("hermitian_exp matches series for small argument") {
  std::mt19937_64 rng(2);
  ComplexTensor g = oracles::random_tensor({4, 4}, rng);
  Eigen::MatrixXcd m = g.as_matrix(1);
  m = (m + m.adjoint()).eval();
  ComplexTensor h = ComplexTensor::from_matrix(m);
  const cxd c(0.0, -1e-4);
  Eigen::MatrixXcd got = hermitian_exp(h, c).as_matrix(1);
  Eigen::MatrixXcd series = Eigen::MatrixXcd::Identity(4, 4) + c * m +
                            0.5 * c * c * m * m +
                            (1.0 / 6.0) * c * c * c * m * m * m;
  CHECK((got - series).norm() < 1e-14);
}

TEST_CASE("real-time trotter product converges at the expected order") {
  IsingParams p{4, 1.0, 1.05, 0.5};
  Eigen::MatrixXcd h = dense_hamiltonian(p);
  auto product_dense = [&](const TrotterStep& step) {
    Eigen::MatrixXcd u =
        Eigen::MatrixXcd::Identity(1L << p.n_sites, 1L << p.n_sites);
    for (const auto& [bond, gate] : step.gates) {
      Eigen::MatrixXcd g = gate.as_matrix(1);
      Eigen::MatrixXcd next(u.rows(), u.cols());
      for (long c = 0; c < u.cols(); ++c)
        next.col(c) =
            oracles::apply_gate_dense(u.col(c), p.n_sites, bond, g);
      u = next;
    }
    return u;
  };
  auto err_at = [&](double dt, TrotterOrder order) {
    Eigen::MatrixXcd exact =
        hermitian_exp(ComplexTensor::from_matrix(h), cxd(0, -dt)).as_matrix(1);
    return (product_dense(trotter_step(p, dt, order,
                                       TrotterKind::real_time_unitary)) -
            exact)
        .norm();
  };
  // Second order: error ~ dt^3 per step; fourth order: ~ dt^5.
  const double r2 = err_at(0.2, TrotterOrder::second) /
                    err_at(0.1, TrotterOrder::second);
  CHECK(r2 == doctest::Approx(8.0).epsilon(0.15));
  const double r4 = err_at(0.2, TrotterOrder::fourth) /
                    err_at(0.1, TrotterOrder::fourth);
  CHECK(r4 == doctest::Approx(32.0).epsilon(0.25));
}

TEST_CASE("imaginary-time gates are positive and non-unitary") {
  IsingParams p{3, 1.0, 1.0, 0.1};
  TrotterStep step = trotter_step(p, 0.05, TrotterOrder::second,
                                  TrotterKind::imaginary_time_nonunitary);
  for (const auto& [bond, gate] : step.gates) {
    Eigen::MatrixXcd g = gate.as_matrix(1);
    CHECK((g - g.adjoint()).norm() < 1e-12);  // e^{-tau h} is Hermitian
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
  CHECK_THROWS_AS(trotter_step(p, -0.1, TrotterOrder::second,
                               TrotterKind::imaginary_time_nonunitary),
                  DomainError);
}

TEST_CASE("mpo reproduces the dense Hamiltonian") {
  IsingParams p{6, 0.8, 1.1, 0.15};
  Eigen::MatrixXcd want = literal_hamiltonian(p);
  Eigen::MatrixXcd got = mpo_to_dense(ising_mpo(p));
  CHECK((want - got).norm() < 1e-11);
  // Shifted MPO adds shift * identity.
  Eigen::MatrixXcd shifted = mpo_to_dense(ising_mpo(p, 2.5));
  CHECK((shifted - want - 2.5 * Eigen::MatrixXcd::Identity(64, 64)).norm() <
        1e-11);
}

TEST_CASE("spectral bound dominates the spectrum") {
  IsingParams p{6, 1.0, 1.2, 0.3};
  Eigen::MatrixXcd h = dense_hamiltonian(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const double bound = spectral_bound(p);
  CHECK(bound > es.eigenvalues().cwiseAbs().maxCoeff());
}

TEST_CASE("dense Hamiltonian size guard") {
  IsingParams p{20, 1.0, 1.0, 0.0};
  CHECK_THROWS_AS(dense_hamiltonian(p), ResourceError);
}
