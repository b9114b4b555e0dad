#ifndef CQC_CIRCUIT_HPP
#define CQC_CIRCUIT_HPP

#include <random>
#include <vector>

#include "cqc/mps.hpp"
#include "cqc/tensor.hpp"

namespace cqc {

// Order-M staircase of two-site gates acting on |0...0>: within a layer the
// gates run over bonds j = 1..N-1 ascending, layers run 1..M in sequence.
struct SequentialCircuit {
  long n_sites = 0;
  long order = 0;
  std::vector<ComplexTensor> gates;  // (layer-1)*(N-1) + (bond-1), each {4,4}

  long n_bonds() const { return n_sites - 1; }
  const ComplexTensor& gate(long layer, long bond) const;
  ComplexTensor& gate(long layer, long bond);
};

SequentialCircuit identity_circuit(long n_sites, long order);

// Identity perturbed by exp(-i angle H) with unit-normalized random Hermitian
// H per gate; useful as a generic optimization start.
SequentialCircuit near_identity_circuit(long n_sites, long order, double angle,
                                        std::mt19937_64& rng);

// Order-1 circuit preparing the given product state exactly.
SequentialCircuit product_state_circuit(
    const std::vector<Eigen::Vector2cd>& site_amplitudes);

// Largest ||U^dag U - 1|| over gates.
double unitarity_defect(const SequentialCircuit& c);
void validate_circuit(const SequentialCircuit& c, double tol = 1e-12);

// Exact MPS of the circuit state (bond dimension <= 2^M), normalized.
MpsState circuit_to_mps(const SequentialCircuit& c, double cutoff = kSvdCutoff);

// Dense amplitudes by direct gate application; site 1 most significant.
Eigen::VectorXcd circuit_to_statevector(const SequentialCircuit& c,
                                        long max_sites = 16);

long circuit_depth_formula(long n_sites, long order);  // 2(M-1) + N-1
// Depth under greedy scheduling: a gate starts once both its qubits are free.
long circuit_depth(const SequentialCircuit& c);

struct ParamCount {
  long total = 0;
  std::vector<long> per_gate;  // application order
};

ParamCount count_parameters(long n_sites, long order);

// Interior bond dimensions min(2^k, 2^{N-k}, chi), k = 1..N-1.
std::vector<long> mps_bond_profile(long n_sites, long chi);

// Independent real parameters of a canonical MPS with the given interior bond
// profile: sum_k 2np - p^2 over site isometries minus the bond-gauge freedom.
long count_parameters_mps(const std::vector<long>& interior_profile);
long count_parameters_mps(long n_sites, long chi);

// Multi-site unitaries placed on contiguous qubit windows, applied in order
// to |0...0>.
struct MultiSiteGate {
  long first_qubit = 1;  // 1-based
  long n_qubits = 1;
  ComplexTensor unitary;  // {2^w, 2^w}
};

struct MultiSiteCircuit {
  long n_sites = 0;
  std::vector<MultiSiteGate> gates;
};

Eigen::VectorXcd multi_circuit_to_statevector(const MultiSiteCircuit& c,
                                              long max_sites = 16);

// Embeds the canonical site tensors into unitaries acting on log2(chi)+1
// qubit windows; bond dimensions are zero-padded up to powers of two and the
// unspecified unitary columns are completed from seeded random data.
MultiSiteCircuit mps_to_circuit_exact(const MpsState& state,
                                      std::mt19937_64& rng);
MultiSiteCircuit mps_to_circuit_exact(const MpsState& state,
                                      unsigned long long seed = 0);

// Collapses a chain of two-site windows (chi <= 2) into an order-1
// SequentialCircuit, absorbing the final single-qubit gate into the last
// two-site gate. Wider windows are rejected.
SequentialCircuit as_order1_sequential(const MultiSiteCircuit& c);

}  // namespace cqc

#endif
