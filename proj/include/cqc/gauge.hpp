#ifndef CQC_GAUGE_HPP
#define CQC_GAUGE_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cqc/circuit.hpp"
#include "cqc/dilation.hpp"

namespace cqc {

// Haar-random unitary: QR of a Gaussian matrix with the R diagonal phase-fixed.
ComplexTensor haar_unitary(long dim, std::mt19937_64& rng);

// One V / V^dag pair pushed through the wire shared by two consecutive gates.
struct GaugeInsertion {
  long after_layer = 0;  // gate whose output absorbs V
  long after_bond = 0;
  long qubit = 0;  // wire carrying the V
  ComplexTensor v;  // 2x2 unitary
};

struct GaugeVariant {
  SequentialCircuit circuit;
  std::uint64_t seed = 0;
  std::vector<GaugeInsertion> inserted_gauges;
};

// Inserts Haar-random V^dag V between every pair of gates that are consecutive
// in application order and share a qubit; the state is unchanged, the gate
// decomposition is not.
GaugeVariant randomize_gauge(const SequentialCircuit& c, std::uint64_t seed);

// Versioned JSON circuit format; doubles stored with full round-trip precision.
std::string circuit_to_json(const SequentialCircuit& c);
SequentialCircuit circuit_from_json(const std::string& text);
void export_circuit(const SequentialCircuit& c, const std::string& path);
SequentialCircuit import_circuit(const std::string& path);

// Dilated gates share the schema, flagged with `ancilla: true` and the scale s.
std::string dilated_gate_to_json(const DilatedGate& g);
DilatedGate dilated_gate_from_json(const std::string& text);

}  // namespace cqc

#endif
