#include "cqc/evolve.hpp"

#include <cmath>
#include <fstream>

namespace cqc {

namespace {

EvolutionStep measure(const SequentialCircuit& c,
                      const std::vector<ComplexTensor>& mpo_h, double time) {
  MpsState s = circuit_to_mps(c);
  EvolutionStep st;
  st.time = time;
  const long n = s.n_sites();
  for (long k = 1; k <= n; ++k) {
    st.sz.push_back(std::real(local_expectation(s, k, pauli_z())));
    st.sx.push_back(std::real(local_expectation(s, k, pauli_x())));
  }
  st.entropy = entropy_at_bond(s, n / 2);
  st.energy = std::real(mpo_expectation(s, mpo_h));
  return st;
}

// One compression step: build the Trotter-evolved target and refit the
// circuit to it, warm-starting from the current gates.
struct StepOutcome {
  double fidelity = 1;
  double truncation = 0;
  long iterations = 0;
  bool hit_max = false;
};

StepOutcome advance(SequentialCircuit& c, const TrotterStep& step,
                    const SweepConfig& sweep_cfg, long bond_cap,
                    bool per_gate) {
  StepOutcome out;
  out.fidelity = 1.0;
  if (!per_gate) {
    MpsState target = circuit_to_mps(c);
    TebdResult r = tebd_evolve(target, step, bond_cap);
    out.truncation = r.truncation_error;
    auto [opt, rep] = maximize_overlap(r.state, std::move(c), sweep_cfg);
    c = std::move(opt);
    out.fidelity = rep.final_fidelity;
    out.iterations = rep.iterations;
    out.hit_max = rep.converged_by == StopReason::max_iters;
  } else {
    for (const auto& [bond, gate] : step.gates) {
      MpsState target = circuit_to_mps(c);
      out.truncation +=
          apply_two_site_gate(target, bond, gate, bond_cap, kSvdCutoff);
      if (step.kind == TrotterKind::imaginary_time_nonunitary)
        target = canonicalize(std::move(target.site_tensors));
      auto [opt, rep] = maximize_overlap(target, std::move(c), sweep_cfg);
      c = std::move(opt);
      out.fidelity *= rep.final_fidelity;
      out.iterations += rep.iterations;
      out.hit_max = out.hit_max || rep.converged_by == StopReason::max_iters;
    }
  }
  return out;
}

void check_common(const EvolutionConfig& cfg, const SequentialCircuit& init) {
  validate_circuit(init, 1e-10);
  if (cfg.params.n_sites != init.n_sites)
    throw DimensionError("Hamiltonian and circuit sizes differ");
  if (cfg.order != init.order)
    throw DimensionError("config order does not match the initial circuit");
  if (cfg.dt <= 0) throw DomainError("dt must be positive");
  if (cfg.t_end <= 0) throw DomainError("t_end must be positive");
}

}  // namespace

EvolutionResult evolve_real(const EvolutionConfig& cfg,
                            const SequentialCircuit& init) {
  check_common(cfg, init);
  const long bond_cap = 1L << std::min<long>(cfg.order + 2, 40);
  const auto mpo_h = ising_mpo(cfg.params);
  TrotterStep step = trotter_step(cfg.params, cfg.dt, cfg.trotter,
                                  TrotterKind::real_time_unitary);
  EvolutionResult res{init, {}};
  res.report.steps.push_back(measure(res.circuit, mpo_h, 0.0));
  double acc = 1.0;
  const long n_steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
  for (long k = 1; k <= n_steps; ++k) {
    StepOutcome o = advance(res.circuit, step, cfg.sweep, bond_cap,
                            cfg.per_gate_compression);
    acc *= o.fidelity;
    EvolutionStep st = measure(res.circuit, mpo_h, k * cfg.dt);
    st.fidelity = o.fidelity;
    st.accumulated = acc;
    st.truncation = o.truncation;
    st.sweep_iterations = o.iterations;
    st.sweep_hit_max_iters = o.hit_max;
    res.report.any_sweep_hit_max_iters |= o.hit_max;
    res.report.steps.push_back(std::move(st));
  }
  return res;
}

EvolutionResult evolve_imaginary(const EvolutionConfig& cfg,
                                 const SequentialCircuit& init) {
  check_common(cfg, init);
  std::vector<double> schedule = cfg.dt_schedule;
  if (schedule.empty()) schedule.push_back(cfg.dt);
  for (size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] <= 0) throw DomainError("dt schedule must be positive");
    if (i > 0 && schedule[i] >= schedule[i - 1])
      throw DomainError("dt schedule must be strictly decreasing");
  }
  const long bond_cap = 1L << std::min<long>(cfg.order + 2, 40);
  const auto mpo_h = ising_mpo(cfg.params);

  EvolutionResult res{init, {}};
  res.report.steps.push_back(measure(res.circuit, mpo_h, 0.0));
  double acc = 1.0, tau = 0.0;
  for (double dtau : schedule) {
    TrotterStep step = trotter_step(cfg.params, dtau, cfg.trotter,
                                    TrotterKind::imaginary_time_nonunitary);
    const long max_steps =
        std::max<long>(1, static_cast<long>(std::ceil(cfg.t_end / dtau)));
    double e_prev = res.report.steps.back().energy;
    for (long k = 0; k < max_steps; ++k) {
      StepOutcome o = advance(res.circuit, step, cfg.sweep, bond_cap,
                              cfg.per_gate_compression);
      acc *= o.fidelity;
      tau += dtau;
      EvolutionStep st = measure(res.circuit, mpo_h, tau);
      st.fidelity = o.fidelity;
      st.accumulated = acc;
      st.truncation = o.truncation;
      st.sweep_iterations = o.iterations;
      st.sweep_hit_max_iters = o.hit_max;
      st.energy_increased = st.energy > e_prev + cfg.energy_increase_tol;
      res.report.any_sweep_hit_max_iters |= o.hit_max;
      res.report.any_energy_increase |= st.energy_increased;
      const double de = std::abs(st.energy - e_prev);
      e_prev = st.energy;
      res.report.steps.push_back(std::move(st));
      if (de < cfg.level_energy_tol) break;  // level converged
    }
  }
  return res;
}

std::optional<double> estimate_error(const EvolutionReport& report,
                                     double threshold) {
  for (const auto& st : report.steps)
    if (st.accumulated < threshold) return st.time;
  return std::nullopt;
}

void write_report_csv(const EvolutionReport& report, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ResourceError("cannot open " + path);
  f.precision(17);
  const long n = report.steps.empty()
                     ? 0
                     : static_cast<long>(report.steps.front().sz.size());
  f << "time,fidelity,accumulated,entropy,energy,truncation,sweep_iterations,"
       "sweep_hit_max_iters,energy_increased";
  for (long k = 1; k <= n; ++k) f << ",sz_" << k;
  for (long k = 1; k <= n; ++k) f << ",sx_" << k;
  f << "\n";
  for (const auto& st : report.steps) {
    f << st.time << ',' << st.fidelity << ',' << st.accumulated << ','
      << st.entropy << ',' << st.energy << ',' << st.truncation << ','
      << st.sweep_iterations << ',' << (st.sweep_hit_max_iters ? 1 : 0) << ','
      << (st.energy_increased ? 1 : 0);
    for (double v : st.sz) f << ',' << v;
    for (double v : st.sx) f << ',' << v;
    f << "\n";
  }
}

}  // namespace cqc
