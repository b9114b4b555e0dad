#ifndef CQC_SWEEP_HPP
#define CQC_SWEEP_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "cqc/circuit.hpp"
#include "cqc/model.hpp"
#include "cqc/mps.hpp"

namespace cqc {

struct SweepConfig {
  long max_iters = 100000;
  double abs_tol = 1e-12;
  double rel_tol = 1e-4;
  // Geodesic extrapolation exponent for each gate update: the rotation from
  // the old gate to the polar optimum is applied to this power. 1 is the
  // plain update; 1 < beta < 2 accelerates the slow collective modes.
  double over_relax = 1.0;
};

enum class StopReason { abs_tol, rel_tol, max_iters };

struct SweepReport {
  double final_fidelity = 0.0;  // |<target|qc>|^2
  long iterations = 0;          // full sweeps
  std::vector<double> fidelity_trace;
  StopReason converged_by = StopReason::max_iters;
};

// Cached partial contractions for <target|circuit>. Entries carry a checksum
// of the tensors they were built from; stale entries are recomputed from
// scratch on access.
struct SweepCache {
  std::vector<ComplexTensor> left;  // left[j] = columns 1..j contracted
  std::vector<ComplexTensor> right; // right[j] = columns j+1..N contracted
  std::vector<std::uint64_t> left_sum, right_sum;
};

// Environment E of gate (layer, bond): <target|circuit> = Tr[E U] with all
// other gates fixed. E is 4x4, rows = gate input index, cols = output index.
ComplexTensor compute_environment(const MpsState& target,
                                  const SequentialCircuit& c, long layer,
                                  long bond, SweepCache* cache = nullptr);

// <target|qc> evaluated through the boundary network (no intermediate MPS).
cxd circuit_overlap(const MpsState& target, const SequentialCircuit& c);

// Algorithm: sweep layers 1..M, bonds 1..N-1, replacing each gate by the
// polar-optimal Y X^dag of its environment; stop on max_iters, eps <= abs_tol,
// or relative change <= rel_tol.
std::pair<SequentialCircuit, SweepReport> maximize_overlap(
    const MpsState& target, SequentialCircuit init, const SweepConfig& cfg = {});

struct EnergyReport {
  double final_energy = 0.0;
  long iterations = 0;
  std::vector<double> energy_trace;  // per sweep, variational <H>
  StopReason converged_by = StopReason::max_iters;
};

// Variational energy minimization over the circuit manifold: per gate,
// linearize <psi|lambda - H|psi> in the ket copy and take the polar optimum;
// the shift lambda >= ||H|| makes every update a guaranteed descent step.
std::pair<SequentialCircuit, EnergyReport> minimize_energy(
    const IsingParams& p, SequentialCircuit init, const SweepConfig& cfg = {});

}  // namespace cqc

#endif
