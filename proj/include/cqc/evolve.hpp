#ifndef CQC_EVOLVE_HPP
#define CQC_EVOLVE_HPP

#include <optional>
#include <string>

#include "cqc/sweep.hpp"

namespace cqc {

enum class EvolveKind { real_time, imaginary_time };

struct EvolutionConfig {
  IsingParams params;
  long order = 1;          // circuit order M
  double dt = 0.01;
  double t_end = 1.0;      // imaginary kind: per-level tau budget
  EvolveKind kind = EvolveKind::real_time;
  TrotterOrder trotter = TrotterOrder::second;
  SweepConfig sweep;
  std::vector<double> dt_schedule;    // imaginary only; strictly decreasing
  double level_energy_tol = 1e-10;    // per-step energy change ending a level
  double energy_increase_tol = 1e-9;  // flags a too-large imaginary step
  bool per_gate_compression = false;  // compress after every Trotter gate
};

struct EvolutionStep {
  double time = 0;
  double fidelity = 1;     // F of this compression step
  double accumulated = 1;  // running product of fidelities
  std::vector<double> sz, sx;
  double entropy = 0;  // half chain, natural log
  double energy = 0;
  double truncation = 0;  // discarded weight building the target
  long sweep_iterations = 0;
  bool sweep_hit_max_iters = false;
  bool energy_increased = false;  // imaginary kind only
};

struct EvolutionReport {
  std::vector<EvolutionStep> steps;  // steps[0] = initial state, F = 1
  bool any_sweep_hit_max_iters = false;
  bool any_energy_increase = false;
};

struct EvolutionResult {
  SequentialCircuit circuit;
  EvolutionReport report;
};

EvolutionResult evolve_real(const EvolutionConfig& cfg,
                            const SequentialCircuit& init);
EvolutionResult evolve_imaginary(const EvolutionConfig& cfg,
                                 const SequentialCircuit& init);

// First time the accumulated fidelity product drops below the threshold.
std::optional<double> estimate_error(const EvolutionReport& report,
                                     double threshold = 1.0 - 1e-2);

void write_report_csv(const EvolutionReport& report, const std::string& path);

}  // namespace cqc

#endif
