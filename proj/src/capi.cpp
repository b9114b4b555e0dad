#include "cqc.h"

#include <string>

#include "cqc/circuit.hpp"
#include "cqc/errors.hpp"
#include "cqc/experiments.hpp"
#include "cqc/gauge.hpp"

struct cqc_circuit {
  cqc::SequentialCircuit c;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
cqc_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return CQC_OK;
  } catch (const cqc::ParseError& e) {
    g_last_error = e.what();
    return CQC_ERR_PARSE;
  } catch (const cqc::DimensionError& e) {
    g_last_error = e.what();
    return CQC_ERR_DIMENSION;
  } catch (const cqc::DomainError& e) {
    g_last_error = e.what();
    return CQC_ERR_DOMAIN;
  } catch (const cqc::NumericalError& e) {
    g_last_error = e.what();
    return CQC_ERR_NUMERICAL;
  } catch (const cqc::ResourceError& e) {
    g_last_error = e.what();
    return CQC_ERR_RESOURCE;
  } catch (const cqc::ConvergenceError& e) {
    g_last_error = e.what();
    return CQC_ERR_CONVERGENCE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CQC_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return CQC_ERR_UNKNOWN;
  }
}

cqc_status invalid(const char* msg) {
  g_last_error = msg;
  return CQC_ERR_INVALID_ARG;
}

}  // namespace

extern "C" {

const char* cqc_version(void) { return "1.0.0"; }

const char* cqc_last_error(void) { return g_last_error.c_str(); }

cqc_status cqc_run_experiment(const char* config_json, const char* out_dir) {
  if (!config_json || !out_dir) return invalid("null argument");
  return guarded([&] {
    cqc::ExperimentConfig cfg = cqc::parse_experiment_config(config_json);
    cqc::run_experiment(cfg, out_dir);
  });
}

cqc_status cqc_circuit_load(const char* path, cqc_circuit** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&] { *out = new cqc_circuit{cqc::import_circuit(path)}; });
}

cqc_status cqc_circuit_save(const cqc_circuit* c, const char* path) {
  if (!c || !path) return invalid("null argument");
  return guarded([&] { cqc::export_circuit(c->c, path); });
}

void cqc_circuit_free(cqc_circuit* c) { delete c; }

cqc_status cqc_circuit_n_sites(const cqc_circuit* c, long* out) {
  if (!c || !out) return invalid("null argument");
  *out = c->c.n_sites;
  return CQC_OK;
}

cqc_status cqc_circuit_order(const cqc_circuit* c, long* out) {
  if (!c || !out) return invalid("null argument");
  *out = c->c.order;
  return CQC_OK;
}

cqc_status cqc_circuit_depth(const cqc_circuit* c, long* out) {
  if (!c || !out) return invalid("null argument");
  return guarded([&] { *out = cqc::circuit_depth(c->c); });
}

cqc_status cqc_circuit_parameter_count(const cqc_circuit* c, long* out) {
  if (!c || !out) return invalid("null argument");
  return guarded(
      [&] { *out = cqc::count_parameters(c->c.n_sites, c->c.order).total; });
}

cqc_status cqc_circuit_statevector(const cqc_circuit* c, double* out,
                                   long len) {
  if (!c || !out) return invalid("null argument");
  return guarded([&] {
    Eigen::VectorXcd psi = cqc::circuit_to_statevector(c->c);
    if (len != 2 * psi.size())
      throw cqc::DimensionError("buffer must hold 2 * 2^N doubles");
    for (long k = 0; k < psi.size(); ++k) {
      out[2 * k] = psi(k).real();
      out[2 * k + 1] = psi(k).imag();
    }
  });
}

cqc_status cqc_circuit_randomize_gauge(const cqc_circuit* c,
                                       unsigned long long seed,
                                       cqc_circuit** out) {
  if (!c || !out) return invalid("null argument");
  return guarded([&] {
    *out = new cqc_circuit{cqc::randomize_gauge(c->c, seed).circuit};
  });
}

}  // extern "C"
