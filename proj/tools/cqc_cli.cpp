#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cqc.h"

namespace {

const std::vector<std::string> kExperiments = {
    "compress_fidelity", "param_scaling",   "evolve_real",
    "evolve_imag",       "domain_wall_qpu", "gauge_check"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed quantum-circuit experiments"};
  std::string experiment, config_path, out_dir = "out";
  bool full_scale = false;
  std::uint64_t seed = 0;
  bool seed_set = false;

  app.add_option("experiment", experiment, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(kExperiments));
  app.add_option("--config", config_path, "JSON config file")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--full-scale", full_scale,
               "Use the paper-scale parameters (hours-scale runs)");
  app.add_option("--seed", seed, "Seed override")
      ->each([&](const std::string&) { seed_set = true; });
  CLI11_PARSE(app, argc, argv);

  nlohmann::json cfg = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    std::ostringstream buf;
    buf << f.rdbuf();
    try {
      cfg = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
      std::cerr << "error: " << config_path << ": " << e.what() << "\n";
      return 1;
    }
    if (cfg.contains("experiment") && cfg["experiment"] != experiment) {
      std::cerr << "error: config is for experiment "
                << cfg["experiment"].get<std::string>() << ", not "
                << experiment << "\n";
      return 1;
    }
  }
  cfg["experiment"] = experiment;
  if (full_scale) cfg["full_scale"] = true;
  if (seed_set) cfg["seed"] = seed;

  const std::string text = cfg.dump();
  if (cqc_run_experiment(text.c_str(), out_dir.c_str()) != CQC_OK) {
    std::cerr << "error: " << cqc_last_error() << "\n";
    return 1;
  }
  std::cout << "wrote " << out_dir << "/ (cqc " << cqc_version() << ")\n";
  return 0;
}
