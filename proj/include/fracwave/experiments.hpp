#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "fracwave/config.hpp"
#include "fracwave/functionals.hpp"

namespace fracwave {

struct Criterion {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string tolerance;
};

struct ExperimentReport {
  std::string kind;
  std::string config_hash;
  nlohmann::json config;
  std::vector<Criterion> criteria;
  nlohmann::json fitted = nlohmann::json::object();
  std::vector<std::string> ledgers;
  bool diverged = false;
  double last_good_time = -1.0;
  std::string error;

  void add(const std::string& name, bool passed, double value, const std::string& tolerance);
  bool passed() const;
  // 0 pass, 1 criterion failure, 3 diverged run.
  int exit_code() const;
  nlohmann::json to_json() const;
};

struct RunOutput {
  Ledger ledger;
  State final_state;
};

// Runs the configured simulation with a ledger row per sample. When `dir`
// is non-empty it receives ledger.csv, manifest.json and, if requested,
// snapshots/. Throws DivergedRun.
RunOutput run_simulation(const RunConfig& config, const std::string& dir = "");

ExperimentReport run_simulate(const RunConfig& config, const std::string& out_dir);
ExperimentReport run_dissipative(const RunConfig& config, const std::string& out_dir);
ExperimentReport run_regularity(const RunConfig& config, const std::string& out_dir);
ExperimentReport run_twin(const RunConfig& config, const std::string& out_dir);
ExperimentReport run_smoothing(const RunConfig& config, const std::string& out_dir);
ExperimentReport run_fracops_verify(const RunConfig& config, const std::string& out_dir);
ExperimentReport run_commutator_study(const RunConfig& config, const std::string& out_dir);
ExperimentReport run_gronwall(const RunConfig& config, const std::string& out_dir);
ExperimentReport run_sweep(const RunConfig& config, const std::string& out_dir);

// Dispatches on config.experiment and writes report.json into out_dir (if non-empty).
ExperimentReport run_experiment(const RunConfig& config, const std::string& out_dir);

// Least-squares decay rate -d log(y)/dt over samples with y > 0.
double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y);

// Slowest energy decay rate of the linear flow, 2 min_k (-Re r_+(k)).
double slowest_linear_rate(const BoxDomain& domain, double gamma, double lambda0);

// sup over centres of the weighted energy norm of (u, v).
double sup_energy_norm(const SpectralField& u, const SpectralField& v, const std::vector<GridField>& weights,
                       double lambda0);
std::vector<GridField> center_weights(const BoxDomain& domain, double epsilon, const std::vector<Point>& centers);

}  // namespace fracwave
