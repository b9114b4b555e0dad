#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "cqc/evolve.hpp"
#include "cqc/gauge.hpp"
#include "oracles.hpp"

using namespace cqc;

namespace {

double phase_aligned_distance(const Eigen::VectorXcd& a,
                              const Eigen::VectorXcd& b) {
  cxd ip = a.dot(b);
  cxd phase = (std::abs(ip) > 0) ? ip / std::abs(ip) : cxd(1.0);
  return (a * phase - b).cwiseAbs().maxCoeff();
}

Eigen::Matrix4cd embed(const Eigen::Matrix2cd& v, bool first_qubit) {
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  for (long a = 0; a < 2; ++a)
    for (long b = 0; b < 2; ++b)
      for (long c = 0; c < 2; ++c) {
        if (first_qubit)
          out(2 * a + c, 2 * b + c) = v(a, b);
        else
          out(2 * c + a, 2 * c + b) = v(a, b);
      }
  return out;
}

SequentialCircuit domain_wall_circuit() {
  Eigen::Vector2cd minus(M_SQRT1_2, -M_SQRT1_2);
  Eigen::Vector2cd plus(M_SQRT1_2, M_SQRT1_2);
  SequentialCircuit init =
      product_state_circuit({minus, minus, plus, plus, plus});
  EvolutionConfig cfg;
  cfg.params = {5, 1.0, 0.25, 0.2};
  cfg.order = 1;
  cfg.dt = 0.05;
  cfg.t_end = 0.5;
  return evolve_real(cfg, init).circuit;
}

}  // namespace

TEST_CASE("haar unitaries are unitary and seed-deterministic") {
  std::mt19937_64 rng(1);
  for (long dim : {2L, 4L}) {
    ComplexTensor u = haar_unitary(dim, rng);
    Eigen::MatrixXcd m = u.as_matrix(1);
    CHECK((m.adjoint() * m - Eigen::MatrixXcd::Identity(dim, dim))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  std::mt19937_64 r1(9), r2(9);
  ComplexTensor a = haar_unitary(2, r1);
  ComplexTensor b = haar_unitary(2, r2);
  for (long k = 0; k < 4; ++k) CHECK(a.data()[k] == b.data()[k]);
}

TEST_CASE("gauge variant preserves the state up to global phase") {
  std::mt19937_64 rng(5);
  SequentialCircuit c = identity_circuit(6, 2);
  for (auto& g : c.gates)
    g = ComplexTensor::from_matrix(oracles::random_unitary(4, rng));
  Eigen::VectorXcd original = circuit_to_statevector(c);
  double max_gate_change = 0;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    GaugeVariant gv = randomize_gauge(c, seed);
    CHECK(unitarity_defect(gv.circuit) < 1e-12);
    CHECK(phase_aligned_distance(original,
                                 circuit_to_statevector(gv.circuit)) < 1e-10);
    CHECK(!gv.inserted_gauges.empty());
    for (size_t k = 0; k < c.gates.size(); ++k)
      max_gate_change = std::max(
          max_gate_change, (gv.circuit.gates[k].as_matrix(1) -
                            c.gates[k].as_matrix(1))
                               .cwiseAbs()
                               .maxCoeff());
  }
  CHECK(max_gate_change > 0.1);  // the decomposition really changed
}

TEST_CASE("same seed reproduces the variant bit-exactly") {
  std::mt19937_64 rng(7);
  SequentialCircuit c = identity_circuit(5, 1);
  for (auto& g : c.gates)
    g = ComplexTensor::from_matrix(oracles::random_unitary(4, rng));
  GaugeVariant a = randomize_gauge(c, 42);
  GaugeVariant b = randomize_gauge(c, 42);
  for (size_t k = 0; k < a.circuit.gates.size(); ++k)
    for (long e = 0; e < 16; ++e)
      CHECK(a.circuit.gates[k].data()[e] == b.circuit.gates[k].data()[e]);
}

TEST_CASE("recorded insertions reconstruct the original gates") {
  // Undoing each V / V^dag pair recovers the input; with V = identity the
  // absorption is therefore the identity map on gates.
  std::mt19937_64 rng(11);
  SequentialCircuit c = identity_circuit(5, 2);
  for (auto& g : c.gates)
    g = ComplexTensor::from_matrix(oracles::random_unitary(4, rng));
  GaugeVariant gv = randomize_gauge(c, 13);
  SequentialCircuit undone = gv.circuit;
  const long nb = c.n_bonds();
  for (auto it = gv.inserted_gauges.rbegin(); it != gv.inserted_gauges.rend();
       ++it) {
    const long k = (it->after_layer - 1) * nb + (it->after_bond - 1);
    const long j2 = (k + 1) % nb + 1;
    Eigen::Matrix2cd v = it->v.as_matrix(1);
    undone.gates[static_cast<size_t>(k)] = ComplexTensor::from_matrix(
        embed(v, it->qubit == it->after_bond).adjoint() *
        undone.gates[static_cast<size_t>(k)].as_matrix(1));
    undone.gates[static_cast<size_t>(k + 1)] = ComplexTensor::from_matrix(
        undone.gates[static_cast<size_t>(k + 1)].as_matrix(1) *
        embed(v, it->qubit == j2));
  }
  for (size_t k = 0; k < c.gates.size(); ++k)
    CHECK((undone.gates[k].as_matrix(1) - c.gates[k].as_matrix(1))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("ten domain-wall variants give identical observables") {
  SequentialCircuit c = domain_wall_circuit();
  MpsState ref = circuit_to_mps(c);
  std::vector<double> sx_ref;
  for (long k = 1; k <= 5; ++k)
    sx_ref.push_back(std::real(local_expectation(ref, k, pauli_x())));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GaugeVariant gv = randomize_gauge(c, seed);
    MpsState s = circuit_to_mps(gv.circuit);
    for (long k = 1; k <= 5; ++k)
      CHECK(std::abs(std::real(local_expectation(s, k, pauli_x())) -
                     sx_ref[static_cast<size_t>(k - 1)]) < 1e-10);
  }
}

TEST_CASE("circuit json round-trips bit-exactly") {
  std::mt19937_64 rng(21);
  SequentialCircuit c = identity_circuit(4, 2);
  for (auto& g : c.gates)
    g = ComplexTensor::from_matrix(oracles::random_unitary(4, rng));
  SequentialCircuit back = circuit_from_json(circuit_to_json(c));
  CHECK(back.n_sites == 4);
  CHECK(back.order == 2);
  for (size_t k = 0; k < c.gates.size(); ++k)
    for (long e = 0; e < 16; ++e)
      CHECK(back.gates[k].data()[e] == c.gates[k].data()[e]);
  // File-based path.
  const std::string path = "gauge_roundtrip.json";
  export_circuit(c, path);
  SequentialCircuit from_file = import_circuit(path);
  std::remove(path.c_str());
  for (size_t k = 0; k < c.gates.size(); ++k)
    for (long e = 0; e < 16; ++e)
      CHECK(from_file.gates[k].data()[e] == c.gates[k].data()[e]);
}

TEST_CASE("import rejects bad documents") {
  CHECK_THROWS_AS(circuit_from_json("{not json"), ParseError);
  CHECK_THROWS_AS(circuit_from_json("{\"schema\": \"cqc-circuit-99\"}"),
                  ParseError);
  CHECK_THROWS_AS(circuit_from_json("{\"n_sites\": 2}"), ParseError);
  // Wrong gate count.
  CHECK_THROWS_AS(
      circuit_from_json("{\"schema\": \"cqc-circuit-1\", \"n_sites\": 3, "
                        "\"order\": 1, \"gates\": []}"),
      ParseError);
}

TEST_CASE("hand-built minimal document parses to a one-gate circuit") {
  std::string text = R"({
    "schema": "cqc-circuit-1",
    "n_sites": 2,
    "order": 1,
    "gates": [
      {"layer": 1, "bond": 1, "u": [
        [1,0],[0,0],[0,0],[0,0],
        [0,0],[1,0],[0,0],[0,0],
        [0,0],[0,0],[0,0],[1,0],
        [0,0],[0,0],[1,0],[0,0]
      ]}
    ]
  })";
  SequentialCircuit c = circuit_from_json(text);
  CHECK(c.gates.size() == 1);
  CHECK(std::abs(c.gate(1, 1).at({2, 3}) - 1.0) < 1e-15);  // a swap-like gate
  validate_circuit(c);
}

TEST_CASE("dilated gate export carries the ancilla marker") {
  IsingParams p{4, 1.0, 1.2, 0.1};
  ComplexTensor a = hermitian_exp(bond_hamiltonian(p, 2), cxd(-0.1, 0.0));
  DilatedGate g = dilate(a, 3);
  std::string text = dilated_gate_to_json(g);
  CHECK(text.find("\"ancilla\": true") != std::string::npos);
  DilatedGate back = dilated_gate_from_json(text);
  CHECK(back.scale == g.scale);
  CHECK(back.seed == g.seed);
  for (long k = 0; k < 64; ++k)
    CHECK(back.unitary.data()[k] == g.unitary.data()[k]);
  CHECK_THROWS_AS(dilated_gate_from_json(circuit_to_json(identity_circuit(2, 1))),
                  ParseError);
}
