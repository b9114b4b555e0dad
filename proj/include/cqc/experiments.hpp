#ifndef CQC_EXPERIMENTS_HPP
#define CQC_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cqc/evolve.hpp"
#include "cqc/gauge.hpp"

namespace cqc {

// One experiment run: name plus the knobs every runner draws from. Defaults
// are desk scale; full_scale switches to the paper's sizes.
struct ExperimentConfig {
  std::string experiment;  // compress_fidelity, param_scaling, evolve_real,
                           // evolve_imag, domain_wall_qpu, gauge_check
  IsingParams params{15, 1.0, 1.4, 0.0};
  std::vector<long> m_list{1, 2, 3, 4};
  std::vector<double> h_list{0.0, 0.1};
  std::vector<long> chi_list{2, 4, 8, 16};
  long reference_chi = 256;
  double dt = 0.01;                  // integrator step
  double t_end = 4.0;
  double dt_sample = 0.1;            // fidelity sampling interval
  double fidelity_threshold = 1e-4;  // t* when F first drops below 1 - this
  double curve_floor = 0.9;  // stop sampling a fidelity curve below this
  TrotterOrder trotter = TrotterOrder::second;
  std::vector<double> dt_schedule{0.1, 0.05, 0.02, 0.01};
  double tau_budget = 30.0;  // per schedule level
  SweepConfig sweep;
  std::uint64_t seed = 1;
  bool full_scale = false;
  long n_gauge_variants = 10;
};

ExperimentConfig default_config(const std::string& experiment, bool full_scale);

// Strict JSON parse: the experiment field selects the defaults, every other
// recognized field overrides them, unknown fields are rejected.
ExperimentConfig parse_experiment_config(const std::string& text);

// Fidelity-vs-time curve of one compressed representation against the TEBD
// reference; chi == 0 marks a circuit curve (order set), otherwise an MPS
// curve at that bond cap.
struct FidelityCurve {
  double h = 0;
  long order = 0;
  long chi = 0;
  std::vector<double> times, fidelities, entropies;
  double t_star = 0;
  bool censored = false;  // never dropped below the threshold before t_end
};

std::vector<FidelityCurve> circuit_fidelity_curves(const ExperimentConfig& cfg);
std::vector<FidelityCurve> mps_fidelity_curves(const ExperimentConfig& cfg);

struct LinearFit {
  double slope = 0, intercept = 0, sse = 0;
  long n = 0;
};
struct ExpFit {
  double a = 0, b = 0, c = 0, sse = 0;
  long n = 0;
};

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);
// Least squares for a e^{b x} + c: scan-and-refine over b with a linear
// solve for (a, c) at each candidate.
ExpFit fit_exponential(const std::vector<double>& x,
                       const std::vector<double>& y);
// Small-sample corrected Akaike criterion for a least-squares fit.
double aicc(double sse, long n_points, long n_params);

struct ExperimentOutput {
  std::vector<std::string> files;  // paths written, in emission order
};

ExperimentOutput run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir);

}  // namespace cqc

#endif
