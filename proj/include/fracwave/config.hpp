#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracwave/dynamics.hpp"

namespace fracwave {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SourceSpec {
  std::string kind = "none";  // none | gaussian
  double amplitude = 1.0;
  double width = 1.0;
  std::optional<Point> center;  // box centre when absent
};

struct InitialDataSpec {
  std::string kind = "random";  // random | zero | mode
  std::uint64_t seed = 1;
  double r_u = 1.5;
  double r_v = 1.0;
  // Unweighted ||grad u||^2 + lambda0 ||u||^2 + ||v||^2 before amplitude scaling.
  double target_energy = 20.0;
  double amplitude = 1.0;
  std::array<int, 3> mode{1, 1, 1};
};

struct TimeSpec {
  double dt = 1e-3;
  double end_time = 10.0;
  double sample_every = 0.05;
  double snapshot_every = 0.0;  // 0 disables snapshots
};

struct WeightsConfig {
  std::vector<double> epsilon{0.1};
  double center_spacing = 1.0;
  double delta = -1.0;  // < 0 selects the default
  double at_constant = 1.0;
  double ball_radius = 2.0;
};

struct RunConfig {
  BoxDomain domain{1, 20.0, 256, 3};
  double gamma = 1.0;
  double lambda0 = 1.0;
  NonlinearitySpec nonlinearity = NonlinearitySpec::quintic();
  SourceSpec source;
  InitialDataSpec initial;
  TimeSpec time;
  WeightsConfig weights;
  std::string experiment = "simulate";
  nlohmann::json options = nlohmann::json::object();
};

const std::vector<std::string>& experiment_kinds();

// Fills defaults, rejects unknown keys and out-of-range values (ConfigError).
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);
// FNV-1a over the canonical JSON dump.
std::uint64_t config_hash(const RunConfig& config);
std::string hash_hex(std::uint64_t h);

Physics make_physics(const RunConfig& config);
SpectralField make_source(const RunConfig& config);
State make_initial_state(const RunConfig& config, const Physics& physics);
// c_k = |k|^{-decay} N(0, 1).
SpectralField random_field(const BoxDomain& domain, double decay, std::uint64_t seed);
// ||grad u||^2 + lambda0 ||u||^2 + ||v||^2 from coefficients.
double plain_energy_norm_sq(const SpectralField& u, const SpectralField& v, double lambda0);

std::vector<Point> ledger_centers(const RunConfig& config);
double resolved_delta(const RunConfig& config, const Physics& physics);
TimeGrid time_grid(const RunConfig& config);

}  // namespace fracwave
