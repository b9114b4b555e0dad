#include "cqc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cqc/errors.hpp"

namespace cqc {

namespace {

using nlohmann::json;

const std::vector<std::string> kExperiments = {
    "compress_fidelity", "param_scaling",   "evolve_real",
    "evolve_imag",       "domain_wall_qpu", "gauge_check"};

std::ofstream open_csv(const std::string& out_dir, const std::string& name,
                       std::vector<std::string>& files) {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + name;
  std::ofstream f(path);
  if (!f) throw ResourceError("cannot open " + path);
  f.precision(17);
  files.push_back(path);
  return f;
}

// t* = last sampled time before the fidelity first drops below 1 - threshold.
void assign_t_star(FidelityCurve& c, double threshold) {
  c.censored = true;
  c.t_star = c.times.empty() ? 0.0 : c.times.back();
  for (size_t k = 0; k < c.fidelities.size(); ++k)
    if (c.fidelities[k] < 1.0 - threshold) {
      c.t_star = (k == 0) ? 0.0 : c.times[k - 1];
      c.censored = false;
      break;
    }
}

long sample_stride(const ExperimentConfig& cfg) {
  const long stride =
      std::max<long>(1, static_cast<long>(std::llround(cfg.dt_sample / cfg.dt)));
  return stride;
}

// Dense exact evolution oracle for small chains.
struct DenseEvolver {
  Eigen::MatrixXcd u_step;
  Eigen::VectorXcd psi;
  DenseEvolver(const IsingParams& p, double dt, const Eigen::VectorXcd& psi0)
      : psi(psi0) {
    Eigen::MatrixXcd h = dense_hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd phases(h.rows());
    for (long k = 0; k < h.rows(); ++k)
      phases(k) = std::exp(cxd(0, -dt * es.eigenvalues()(k)));
    u_step = es.eigenvectors() * phases.asDiagonal() *
             es.eigenvectors().adjoint();
  }
  void step() { psi = u_step * psi; }
  double sx(long site, long n) const {  // 1-based, site 1 most significant
    const long shift = n - site;
    cxd acc = 0;
    for (long b = 0; b < psi.size(); ++b)
      acc += std::conj(psi(b ^ (1L << shift))) * psi(b);
    return std::real(acc);
  }
};

SequentialCircuit domain_wall_initial() {
  Eigen::Vector2cd minus(M_SQRT1_2, -M_SQRT1_2);
  Eigen::Vector2cd plus(M_SQRT1_2, M_SQRT1_2);
  return product_state_circuit({minus, minus, plus, plus, plus});
}

void write_fidelity_rows(std::ofstream& f, const FidelityCurve& c) {
  for (size_t k = 0; k < c.times.size(); ++k)
    f << c.h << ',' << c.order << ',' << c.chi << ',' << c.times[k] << ','
      << c.fidelities[k] << ',' << c.entropies[k] << "\n";
}

}  // namespace

ExperimentConfig default_config(const std::string& experiment,
                                bool full_scale) {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) ==
      kExperiments.end())
    throw ParseError("unknown experiment: " + experiment);
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.full_scale = full_scale;
  if (experiment == "compress_fidelity" || experiment == "param_scaling") {
    // Fidelity scans only need infidelity resolved to ~1e-6 (threshold 1e-4);
    // an absolute floor stops the near-exact early-time fits from grinding.
    cfg.sweep.abs_tol = 1e-6;
    if (full_scale) {
      cfg.params.n_sites = 31;
      cfg.reference_chi = 1024;
      cfg.t_end = 5.0;
    }
  } else if (experiment == "evolve_real") {
    cfg.params = {11, 1.0, 1.4, 0.1};
    cfg.m_list = {1, 2, 3};
    cfg.dt = 0.02;
    cfg.t_end = full_scale ? 6.0 : 4.0;
  } else if (experiment == "evolve_imag") {
    cfg.params = {31, 1.0, 1.2, 0.1};
    cfg.m_list = {1, 2, 3};
  } else {  // domain_wall_qpu, gauge_check
    cfg.params = {5, 1.0, 0.25, 0.2};
    cfg.m_list = {1};
    cfg.dt = 0.02;
    cfg.t_end = (experiment == "gauge_check") ? 1.0 : 5.0;
  }
  return cfg;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object() || !doc.contains("experiment") ||
      !doc["experiment"].is_string())
    throw ParseError("config needs an experiment name");
  ExperimentConfig cfg = default_config(doc["experiment"].get<std::string>(),
                                        doc.value("full_scale", false));
  for (const auto& [key, val] : doc.items()) {
    if (key == "experiment" || key == "full_scale") {
    } else if (key == "n_sites") {
      cfg.params.n_sites = val.get<long>();
    } else if (key == "coupling") {
      cfg.params.coupling = val.get<double>();
    } else if (key == "transverse") {
      cfg.params.transverse = val.get<double>();
    } else if (key == "longitudinal") {
      cfg.params.longitudinal = val.get<double>();
    } else if (key == "m_list") {
      cfg.m_list = val.get<std::vector<long>>();
    } else if (key == "h_list") {
      cfg.h_list = val.get<std::vector<double>>();
    } else if (key == "chi_list") {
      cfg.chi_list = val.get<std::vector<long>>();
    } else if (key == "reference_chi") {
      cfg.reference_chi = val.get<long>();
    } else if (key == "dt") {
      cfg.dt = val.get<double>();
    } else if (key == "t_end") {
      cfg.t_end = val.get<double>();
    } else if (key == "dt_sample") {
      cfg.dt_sample = val.get<double>();
    } else if (key == "fidelity_threshold") {
      cfg.fidelity_threshold = val.get<double>();
    } else if (key == "curve_floor") {
      cfg.curve_floor = val.get<double>();
    } else if (key == "trotter") {
      const std::string s = val.get<std::string>();
      if (s == "second")
        cfg.trotter = TrotterOrder::second;
      else if (s == "fourth")
        cfg.trotter = TrotterOrder::fourth;
      else
        throw ParseError("trotter must be second or fourth");
    } else if (key == "dt_schedule") {
      cfg.dt_schedule = val.get<std::vector<double>>();
    } else if (key == "tau_budget") {
      cfg.tau_budget = val.get<double>();
    } else if (key == "seed") {
      cfg.seed = val.get<std::uint64_t>();
    } else if (key == "n_gauge_variants") {
      cfg.n_gauge_variants = val.get<long>();
    } else if (key == "sweep") {
      if (!val.is_object()) throw ParseError("sweep must be an object");
      for (const auto& [sk, sv] : val.items()) {
        if (sk == "max_iters")
          cfg.sweep.max_iters = sv.get<long>();
        else if (sk == "abs_tol")
          cfg.sweep.abs_tol = sv.get<double>();
        else if (sk == "rel_tol")
          cfg.sweep.rel_tol = sv.get<double>();
        else
          throw ParseError("unknown sweep field: " + sk);
      }
    } else {
      throw ParseError("unknown config field: " + key);
    }
  }
  if (cfg.params.n_sites < 2) throw ParseError("n_sites must be >= 2");
  if (cfg.dt <= 0 || cfg.t_end <= 0 || cfg.dt_sample <= 0)
    throw ParseError("time parameters must be positive");
  return cfg;
}

std::vector<FidelityCurve> circuit_fidelity_curves(
    const ExperimentConfig& cfg) {
  std::vector<FidelityCurve> curves;
  const long n = cfg.params.n_sites;
  const long stride = sample_stride(cfg);
  const long n_steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
  for (double h : cfg.h_list) {
    IsingParams p = cfg.params;
    p.longitudinal = h;
    TrotterStep step =
        trotter_step(p, cfg.dt, cfg.trotter, TrotterKind::real_time_unitary);
    MpsState ref = polarized_mps(n);
    std::vector<SequentialCircuit> circ;
    std::vector<FidelityCurve> local;
    for (long m : cfg.m_list) {
      circ.push_back(identity_circuit(n, m));
      FidelityCurve c;
      c.h = h;
      c.order = m;
      c.times = {0.0};
      c.fidelities = {1.0};
      c.entropies = {0.0};
      local.push_back(std::move(c));
    }
    std::vector<bool> done(circ.size(), false);
    for (long s = 1; s <= n_steps; ++s) {
      if (std::all_of(done.begin(), done.end(), [](bool d) { return d; }))
        break;
      ref = tebd_evolve(ref, step, cfg.reference_chi).state;
      if (s % stride != 0) continue;
      for (size_t k = 0; k < circ.size(); ++k) {
        if (done[k]) continue;
        auto [opt, rep] = maximize_overlap(ref, std::move(circ[k]), cfg.sweep);
        circ[k] = std::move(opt);
        local[k].times.push_back(s * cfg.dt);
        local[k].fidelities.push_back(rep.final_fidelity);
        local[k].entropies.push_back(
            half_chain_entropy(circuit_to_mps(circ[k])));
        done[k] = rep.final_fidelity < cfg.curve_floor;
      }
    }
    for (auto& c : local) {
      assign_t_star(c, cfg.fidelity_threshold);
      curves.push_back(std::move(c));
    }
  }
  return curves;
}

std::vector<FidelityCurve> mps_fidelity_curves(const ExperimentConfig& cfg) {
  std::vector<FidelityCurve> curves;
  const long n = cfg.params.n_sites;
  const long stride = sample_stride(cfg);
  const long n_steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
  for (double h : cfg.h_list) {
    IsingParams p = cfg.params;
    p.longitudinal = h;
    TrotterStep step =
        trotter_step(p, cfg.dt, cfg.trotter, TrotterKind::real_time_unitary);
    MpsState ref = polarized_mps(n);
    std::vector<MpsState> trunc;
    std::vector<FidelityCurve> local;
    for (long chi : cfg.chi_list) {
      trunc.push_back(polarized_mps(n));
      FidelityCurve c;
      c.h = h;
      c.chi = chi;
      c.times = {0.0};
      c.fidelities = {1.0};
      c.entropies = {0.0};
      local.push_back(std::move(c));
    }
    std::vector<bool> done(trunc.size(), false);
    for (long s = 1; s <= n_steps; ++s) {
      if (std::all_of(done.begin(), done.end(), [](bool d) { return d; }))
        break;
      ref = tebd_evolve(ref, step, cfg.reference_chi).state;
      for (size_t k = 0; k < trunc.size(); ++k)
        if (!done[k]) trunc[k] = tebd_evolve(trunc[k], step, cfg.chi_list[k]).state;
      if (s % stride != 0) continue;
      for (size_t k = 0; k < trunc.size(); ++k) {
        if (done[k]) continue;
        const double fid = std::norm(overlap(ref, trunc[k]));
        local[k].times.push_back(s * cfg.dt);
        local[k].fidelities.push_back(fid);
        local[k].entropies.push_back(half_chain_entropy(trunc[k]));
        done[k] = fid < cfg.curve_floor;
      }
    }
    for (auto& c : local) {
      assign_t_star(c, cfg.fidelity_threshold);
      curves.push_back(std::move(c));
    }
  }
  return curves;
}

LinearFit fit_linear(const std::vector<double>& x,
                     const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw DomainError("linear fit needs at least 3 points");
  const long n = static_cast<long>(x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (long k = 0; k < n; ++k) {
    a(k, 0) = x[static_cast<size_t>(k)];
    a(k, 1) = 1.0;
    b(k) = y[static_cast<size_t>(k)];
  }
  Eigen::Vector2d sol = a.colPivHouseholderQr().solve(b);
  LinearFit fit;
  fit.slope = sol(0);
  fit.intercept = sol(1);
  fit.sse = (a * sol - b).squaredNorm();
  fit.n = n;
  return fit;
}

ExpFit fit_exponential(const std::vector<double>& x,
                       const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw DomainError("exponential fit needs at least 3 points");
  const long n = static_cast<long>(x.size());
  auto solve_at = [&](double b, ExpFit& out) {
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd rhs(n);
    for (long k = 0; k < n; ++k) {
      a(k, 0) = std::exp(b * x[static_cast<size_t>(k)]);
      a(k, 1) = 1.0;
      rhs(k) = y[static_cast<size_t>(k)];
    }
    Eigen::Vector2d sol = a.colPivHouseholderQr().solve(rhs);
    out.a = sol(0);
    out.b = b;
    out.c = sol(1);
    out.sse = (a * sol - rhs).squaredNorm();
    out.n = n;
  };
  ExpFit best;
  best.sse = std::numeric_limits<double>::infinity();
  double lo = 0.01, hi = 5.0;
  for (int level = 0; level < 4; ++level) {
    const double step = (hi - lo) / 80.0;
    double best_b = best.b;
    for (double b = lo; b <= hi; b += step) {
      ExpFit cand;
      solve_at(b, cand);
      if (cand.sse < best.sse) {
        best = cand;
        best_b = b;
      }
    }
    lo = std::max(1e-4, best_b - step);
    hi = best_b + step;
  }
  return best;
}

double aicc(double sse, long n_points, long n_params) {
  const double n = static_cast<double>(n_points);
  double aic = n * std::log(std::max(sse, 1e-300) / n) + 2.0 * n_params;
  // Small-sample correction only when it is defined; plain AIC otherwise.
  const double denom = n - n_params - 1.0;
  if (denom > 0) aic += 2.0 * n_params * (n_params + 1.0) / denom;
  return aic;
}

namespace {

ExperimentOutput run_compress_fidelity(const ExperimentConfig& cfg,
                                       const std::string& out_dir) {
  ExperimentOutput out;
  auto curves = circuit_fidelity_curves(cfg);
  {
    std::ofstream f = open_csv(out_dir, "compress_fidelity.csv", out.files);
    f << "h,order,chi,time,fidelity,entropy\n";
    for (const auto& c : curves) write_fidelity_rows(f, c);
  }
  std::ofstream f = open_csv(out_dir, "t_star.csv", out.files);
  f << "h,order,t_star,censored\n";
  for (const auto& c : curves)
    f << c.h << ',' << c.order << ',' << c.t_star << ',' << (c.censored ? 1 : 0)
      << "\n";
  return out;
}

ExperimentOutput run_param_scaling(const ExperimentConfig& cfg,
                                   const std::string& out_dir) {
  ExperimentOutput out;
  auto circuit_curves = circuit_fidelity_curves(cfg);
  auto mps_curves = mps_fidelity_curves(cfg);
  std::ofstream data = open_csv(out_dir, "param_scaling.csv", out.files);
  data << "h,family,order,chi,t_star,parameters\n";
  std::ofstream fits = open_csv(out_dir, "fits.csv", out.files);
  fits << "h,family,model,a,b,c,sse,aicc,preferred\n";
  for (double h : cfg.h_list) {
    std::vector<double> xc, yc, xm, ym;
    for (const auto& c : circuit_curves)
      if (c.h == h) {
        const long params =
            count_parameters(cfg.params.n_sites, c.order).total;
        xc.push_back(c.t_star);
        yc.push_back(static_cast<double>(params));
        data << h << ",circuit," << c.order << ",0," << c.t_star << ','
             << params << "\n";
      }
    for (const auto& c : mps_curves)
      if (c.h == h) {
        const long params = count_parameters_mps(cfg.params.n_sites, c.chi);
        xm.push_back(c.t_star);
        ym.push_back(static_cast<double>(params));
        data << h << ",mps,0," << c.chi << ',' << c.t_star << ',' << params
             << "\n";
      }
    for (int family = 0; family < 2; ++family) {
      const auto& x = family == 0 ? xc : xm;
      const auto& y = family == 0 ? yc : ym;
      const char* name = family == 0 ? "circuit" : "mps";
      LinearFit lin = fit_linear(x, y);
      ExpFit ex = fit_exponential(x, y);
      const double aic_lin = aicc(lin.sse, lin.n, 2);
      const double aic_exp = aicc(ex.sse, ex.n, 3);
      fits << h << ',' << name << ",linear," << lin.slope << ','
           << lin.intercept << ",0," << lin.sse << ',' << aic_lin << ','
           << (aic_lin <= aic_exp ? 1 : 0) << "\n";
      fits << h << ',' << name << ",exponential," << ex.a << ',' << ex.b << ','
           << ex.c << ',' << ex.sse << ',' << aic_exp << ','
           << (aic_exp < aic_lin ? 1 : 0) << "\n";
    }
  }
  return out;
}

ExperimentOutput run_evolve_real_exp(const ExperimentConfig& cfg,
                                     const std::string& out_dir) {
  ExperimentOutput out;
  for (long m : cfg.m_list) {
    EvolutionConfig ec;
    ec.params = cfg.params;
    ec.order = m;
    ec.dt = cfg.dt;
    ec.t_end = cfg.t_end;
    ec.trotter = cfg.trotter;
    ec.sweep = cfg.sweep;
    EvolutionResult res = evolve_real(ec, identity_circuit(cfg.params.n_sites, m));
    std::filesystem::create_directories(out_dir);
    const std::string path =
        out_dir + "/evolve_real_m" + std::to_string(m) + ".csv";
    write_report_csv(res.report, path);
    out.files.push_back(path);
  }
  // TEBD reference on the same grid for comparison.
  TrotterStep step = trotter_step(cfg.params, cfg.dt, cfg.trotter,
                                  TrotterKind::real_time_unitary);
  MpsState ref = polarized_mps(cfg.params.n_sites);
  std::ofstream f = open_csv(out_dir, "reference_central_sz.csv", out.files);
  f << "time,sz_center,entropy\n";
  const long center = cfg.params.n_sites / 2 + 1;
  f << 0.0 << ',' << std::real(local_expectation(ref, center, pauli_z())) << ','
    << half_chain_entropy(ref) << "\n";
  const long n_steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
  for (long s = 1; s <= n_steps; ++s) {
    ref = tebd_evolve(ref, step, cfg.reference_chi).state;
    f << s * cfg.dt << ','
      << std::real(local_expectation(ref, center, pauli_z())) << ','
      << half_chain_entropy(ref) << "\n";
  }
  return out;
}

ExperimentOutput run_evolve_imag_exp(const ExperimentConfig& cfg,
                                     const std::string& out_dir) {
  ExperimentOutput out;
  std::ofstream summary = open_csv(out_dir, "energies.csv", out.files);
  summary << "order,imaginary_time_energy,variational_energy,difference\n";
  for (long m : cfg.m_list) {
    EvolutionConfig ec;
    ec.params = cfg.params;
    ec.order = m;
    ec.kind = EvolveKind::imaginary_time;
    ec.trotter = cfg.trotter;
    ec.dt_schedule = cfg.dt_schedule;
    ec.t_end = cfg.tau_budget;
    ec.sweep = cfg.sweep;
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(m));
    EvolutionResult res = evolve_imaginary(
        ec, near_identity_circuit(cfg.params.n_sites, m, 1e-2, rng));
    const std::string path =
        out_dir + "/evolve_imag_m" + std::to_string(m) + ".csv";
    write_report_csv(res.report, path);
    out.files.push_back(path);
    SweepConfig tight = cfg.sweep;
    tight.abs_tol = 1e-12;
    tight.rel_tol = 1e-12;
    std::mt19937_64 rng2(cfg.seed + 100 + static_cast<std::uint64_t>(m));
    auto [vc, vrep] = minimize_energy(
        cfg.params, near_identity_circuit(cfg.params.n_sites, m, 1e-2, rng2),
        tight);
    const double e_imag = res.report.steps.back().energy;
    summary << m << ',' << e_imag << ',' << vrep.final_energy << ','
            << e_imag - vrep.final_energy << "\n";
  }
  return out;
}

ExperimentOutput run_domain_wall(const ExperimentConfig& cfg,
                                 const std::string& out_dir) {
  ExperimentOutput out;
  EvolutionConfig ec;
  ec.params = cfg.params;
  ec.order = 1;
  ec.dt = cfg.dt;
  ec.t_end = cfg.t_end;
  ec.trotter = cfg.trotter;
  ec.sweep = cfg.sweep;
  SequentialCircuit init = domain_wall_initial();
  EvolutionResult res = evolve_real(ec, init);
  DenseEvolver ed(cfg.params, cfg.dt, circuit_to_statevector(init));
  const long n = cfg.params.n_sites;
  const long center = n / 2 + 1;
  std::ofstream grid = open_csv(out_dir, "domain_wall.csv", out.files);
  grid << "time,site,sx_circuit,sx_ed\n";
  std::ofstream central = open_csv(out_dir, "domain_wall_central.csv",
                                   out.files);
  central << "time,sx_circuit,sx_ed,abs_error\n";
  for (size_t k = 0; k < res.report.steps.size(); ++k) {
    const auto& st = res.report.steps[k];
    if (k > 0) ed.step();
    for (long site = 1; site <= n; ++site)
      grid << st.time << ',' << site << ','
           << st.sx[static_cast<size_t>(site - 1)] << ',' << ed.sx(site, n)
           << "\n";
    const double c_circ = st.sx[static_cast<size_t>(center - 1)];
    const double c_ed = ed.sx(center, n);
    central << st.time << ',' << c_circ << ',' << c_ed << ','
            << std::abs(c_circ - c_ed) << "\n";
  }
  std::filesystem::create_directories(out_dir);
  const std::string cpath = out_dir + "/domain_wall_circuit.json";
  export_circuit(res.circuit, cpath);
  out.files.push_back(cpath);
  for (long k = 1; k <= cfg.n_gauge_variants; ++k) {
    GaugeVariant gv =
        randomize_gauge(res.circuit, cfg.seed + static_cast<std::uint64_t>(k));
    const std::string vpath =
        out_dir + "/domain_wall_variant_" + std::to_string(k) + ".json";
    export_circuit(gv.circuit, vpath);
    out.files.push_back(vpath);
  }
  return out;
}

ExperimentOutput run_gauge_check(const ExperimentConfig& cfg,
                                 const std::string& out_dir) {
  ExperimentOutput out;
  EvolutionConfig ec;
  ec.params = cfg.params;
  ec.order = 1;
  ec.dt = cfg.dt;
  ec.t_end = cfg.t_end;
  ec.trotter = cfg.trotter;
  ec.sweep = cfg.sweep;
  SequentialCircuit c = evolve_real(ec, domain_wall_initial()).circuit;
  MpsState ref_state = circuit_to_mps(c);
  const long n = cfg.params.n_sites;
  std::vector<double> ref_sx;
  for (long site = 1; site <= n; ++site)
    ref_sx.push_back(std::real(local_expectation(ref_state, site, pauli_x())));
  std::ofstream f = open_csv(out_dir, "gauge_check.csv", out.files);
  f << "seed,site,sx,deviation\n";
  double max_dev = 0;
  for (long k = 1; k <= cfg.n_gauge_variants; ++k) {
    GaugeVariant gv =
        randomize_gauge(c, cfg.seed + static_cast<std::uint64_t>(k));
    MpsState s = circuit_to_mps(gv.circuit);
    for (long site = 1; site <= n; ++site) {
      const double sx = std::real(local_expectation(s, site, pauli_x()));
      const double dev = std::abs(sx - ref_sx[static_cast<size_t>(site - 1)]);
      max_dev = std::max(max_dev, dev);
      f << gv.seed << ',' << site << ',' << sx << ',' << dev << "\n";
    }
  }
  std::ofstream summary = open_csv(out_dir, "gauge_check_summary.csv",
                                   out.files);
  summary << "n_variants,max_deviation\n";
  summary << cfg.n_gauge_variants << ',' << max_dev << "\n";
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir) {
  if (cfg.experiment == "compress_fidelity")
    return run_compress_fidelity(cfg, out_dir);
  if (cfg.experiment == "param_scaling") return run_param_scaling(cfg, out_dir);
  if (cfg.experiment == "evolve_real") return run_evolve_real_exp(cfg, out_dir);
  if (cfg.experiment == "evolve_imag") return run_evolve_imag_exp(cfg, out_dir);
  if (cfg.experiment == "domain_wall_qpu") return run_domain_wall(cfg, out_dir);
  if (cfg.experiment == "gauge_check") return run_gauge_check(cfg, out_dir);
  throw DomainError("unknown experiment: " + cfg.experiment);
}

}  // namespace cqc
