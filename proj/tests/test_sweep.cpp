#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cqc/sweep.hpp"
#include "oracles.hpp"

using namespace cqc;

namespace {

SequentialCircuit random_circuit(long n, long m, unsigned seed) {
  SequentialCircuit c = identity_circuit(n, m);
  std::mt19937_64 rng(seed);
  for (auto& g : c.gates)
    g = ComplexTensor::from_matrix(oracles::random_unitary(4, rng));
  return c;
}

cxd dense_overlap(const MpsState& target, const SequentialCircuit& c) {
  Eigen::VectorXcd vt = mps_to_statevector(target);
  Eigen::VectorXcd vc = circuit_to_statevector(c);
  return vt.dot(vc);
}

}  // namespace

TEST_CASE("boundary overlap matches the dense oracle") {
  for (long m : {1L, 2L, 3L}) {
    std::mt19937_64 rng(static_cast<unsigned>(m));
    MpsState target = random_mps(6, 5, rng);
    SequentialCircuit c = random_circuit(6, m, 40 + static_cast<unsigned>(m));
    CHECK(std::abs(circuit_overlap(target, c) - dense_overlap(target, c)) <
          1e-12);
  }
}

TEST_CASE("environment linearity: overlap = Tr[E U] at every gate") {
  for (long m : {1L, 2L}) {
    std::mt19937_64 rng(7 + static_cast<unsigned>(m));
    MpsState target = random_mps(6, 4, rng);
    SequentialCircuit c = random_circuit(6, m, 80 + static_cast<unsigned>(m));
    const cxd want = dense_overlap(target, c);
    for (long i = 1; i <= m; ++i)
      for (long j = 1; j <= 5; ++j) {
        ComplexTensor e = compute_environment(target, c, i, j);
        cxd got =
            (e.as_matrix(1) * c.gate(i, j).as_matrix(1)).trace();
        CHECK(std::abs(got - want) < 1e-12);
      }
  }
}

TEST_CASE("environment is the overlap gradient (finite differences)") {
  std::mt19937_64 rng(3);
  MpsState target = random_mps(5, 4, rng);
  SequentialCircuit c = random_circuit(5, 2, 11);
  ComplexTensor e = compute_environment(target, c, 2, 3);
  const double h = 1e-6;
  for (long r = 0; r < 4; ++r)
    for (long cc = 0; cc < 4; ++cc) {
      SequentialCircuit cp = c;
      cp.gate(2, 3).at({r, cc}) += h;
      // Bypass unitarity validation: measure through the dense oracle on the
      // perturbed (slightly non-unitary) gate list.
      Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(1L << 5);
      psi(0) = 1.0;
      for (long i = 1; i <= 2; ++i)
        for (long j = 1; j <= 4; ++j)
          psi = oracles::apply_gate_dense(psi, 5, j,
                                          cp.gate(i, j).as_matrix(1));
      const cxd f1 = mps_to_statevector(target).dot(psi);
      const cxd f0 = dense_overlap(target, c);
      // d overlap / d U[r,c] = E[c, r]
      CHECK(std::abs((f1 - f0) / h - e.at({cc, r})) < 1e-6);
    }
}

TEST_CASE("self-target environments give unit overlap") {
  SequentialCircuit c = random_circuit(5, 2, 19);
  MpsState target = circuit_to_mps(c);
  for (long i = 1; i <= 2; ++i)
    for (long j = 1; j <= 4; ++j) {
      ComplexTensor e = compute_environment(target, c, i, j);
      cxd tr = (e.as_matrix(1) * c.gate(i, j).as_matrix(1)).trace();
      CHECK(std::abs(tr - 1.0) < 1e-12);
    }
}

TEST_CASE("polar update never decreases the overlap") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    long m = 1 + static_cast<long>(trial % 2);
    MpsState target = random_mps(5, 4, rng);
    SequentialCircuit c =
        random_circuit(5, m, 1000 + static_cast<unsigned>(trial));
    long i = 1 + static_cast<long>(rng() % static_cast<unsigned long>(m));
    long j = 1 + static_cast<long>(rng() % 4);
    ComplexTensor e = compute_environment(target, c, i, j);
    const double before = std::norm(dense_overlap(target, c));
    c.gate(i, j) = polar_unitary(e);
    const double after = std::norm(dense_overlap(target, c));
    CHECK(after >= before - 1e-12);
  }
}

TEST_CASE("cached environments equal from-scratch after random updates") {
  std::mt19937_64 rng(29);
  MpsState target = random_mps(6, 4, rng);
  SequentialCircuit c = random_circuit(6, 2, 77);
  SweepCache cache;
  for (int step = 0; step < 30; ++step) {
    long i = 1 + static_cast<long>(rng() % 2);
    long j = 1 + static_cast<long>(rng() % 5);
    ComplexTensor cached = compute_environment(target, c, i, j, &cache);
    ComplexTensor fresh = compute_environment(target, c, i, j);
    for (long r = 0; r < 4; ++r)
      for (long cc = 0; cc < 4; ++cc)
        CHECK(std::abs(cached.at({r, cc}) - fresh.at({r, cc})) < 1e-12);
    // Random gate mutation to stress the checksums.
    c.gate(i, j) = ComplexTensor::from_matrix(oracles::random_unitary(4, rng));
  }
}

TEST_CASE("maximize_overlap recovers representable targets") {
  for (long m : {1L, 2L}) {
    SequentialCircuit truth = random_circuit(6, m, 5 + static_cast<unsigned>(m));
    MpsState target = circuit_to_mps(truth);
    std::mt19937_64 rng(2);
    auto [c, rep] = maximize_overlap(
        target, near_identity_circuit(6, m, 1e-2, rng), {});
    CHECK(rep.final_fidelity >= 1.0 - 1e-8);
    CHECK(std::norm(dense_overlap(target, c)) ==
          doctest::Approx(rep.final_fidelity).epsilon(1e-10));
  }
}

TEST_CASE("chi=2 targets are reached exactly at order 1") {
  std::mt19937_64 rng(31);
  MpsState target = random_mps(7, 2, rng);
  SweepConfig cfg;
  cfg.rel_tol = 1e-9;  // push close to the exact representation
  auto [c, rep] = maximize_overlap(
      target, near_identity_circuit(7, 1, 1e-2, rng), cfg);
  CHECK(rep.final_fidelity >= 1.0 - 1e-10);
}

TEST_CASE("fidelity trace is monotone and reports stop reason") {
  std::mt19937_64 rng(41);
  MpsState target = random_mps(6, 8, rng);
  auto [c, rep] = maximize_overlap(
      target, near_identity_circuit(6, 2, 1e-2, rng), {});
  for (size_t k = 1; k < rep.fidelity_trace.size(); ++k)
    CHECK(rep.fidelity_trace[k] >= rep.fidelity_trace[k - 1] - 1e-12);
  CHECK(rep.iterations == static_cast<long>(rep.fidelity_trace.size()));
  CHECK((rep.converged_by == StopReason::rel_tol ||
         rep.converged_by == StopReason::abs_tol));
}

TEST_CASE("max_iters exit is reported, not thrown") {
  std::mt19937_64 rng(43);
  MpsState target = random_mps(6, 8, rng);
  SweepConfig cfg;
  cfg.max_iters = 2;
  cfg.rel_tol = 1e-30;
  cfg.abs_tol = 1e-300;
  auto [c, rep] = maximize_overlap(
      target, near_identity_circuit(6, 2, 1e-2, rng), cfg);
  CHECK(rep.converged_by == StopReason::max_iters);
  CHECK(rep.iterations == 2);
}

TEST_CASE("minimize_energy reaches the exact ground state at small size") {
  IsingParams p{4, 1.0, 1.1, 0.3};
  Eigen::MatrixXcd h = dense_hamiltonian(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  std::mt19937_64 rng(3);
  SweepConfig cfg;
  cfg.abs_tol = 1e-12;
  cfg.rel_tol = 1e-12;
  auto [c, rep] = minimize_energy(p, near_identity_circuit(4, 2, 1e-2, rng), cfg);
  CHECK(rep.final_energy == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-8));
  CHECK(rep.final_energy >= es.eigenvalues()(0) - 1e-10);  // variational
  for (size_t k = 1; k < rep.energy_trace.size(); ++k)
    CHECK(rep.energy_trace[k] <= rep.energy_trace[k - 1] + 1e-10);
}

TEST_CASE("order-1 energy matches chi=2 DMRG") {
  IsingParams p{10, 1.0, 1.2, 0.1};
  DmrgResult dm = dmrg_ground_state(p, 2);
  std::mt19937_64 rng(9);
  SweepConfig cfg;
  cfg.abs_tol = 1e-12;
  cfg.rel_tol = 1e-12;
  auto [c, rep] = minimize_energy(p, near_identity_circuit(10, 1, 1e-2, rng), cfg);
  CHECK(rep.final_energy == doctest::Approx(dm.energy).epsilon(1e-7));
}

TEST_CASE("strong transverse field polarizes the chain") {
  IsingParams p{6, 1.0, 100.0, 0.0};
  std::mt19937_64 rng(5);
  auto [c, rep] = minimize_energy(p, near_identity_circuit(6, 1, 1e-2, rng), {});
  CHECK(rep.final_energy / 6.0 ==
        doctest::Approx(-p.coupling * p.transverse).epsilon(0.01));
  MpsState s = circuit_to_mps(c);
  CHECK(std::real(local_expectation(s, 3, pauli_z())) > 0.99);
}
