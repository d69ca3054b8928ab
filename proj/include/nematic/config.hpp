#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "nematic/dynamics.hpp"
#include "nematic/init.hpp"
#include "nematic/stationary.hpp"

namespace nematic {

/// Invalid configuration. `field()` is the dotted path of the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct SchemeConfig {
  double dt = 0.0;  // 0: chosen by CFL
  double dt_max = 0.02;
  double t_end = 10.0;
  double cfl_safety = 0.5;
  std::optional<double> budget_tol;  // empty: calibrated
  int calibration_steps = 20;
  double budget_factor = 10.0;
  double budget_floor = 1e-14;
  bool director_only = false;
};

struct OutputConfig {
  int cadence = 1;
  int snapshot_every = 20;
  std::string out_dir = "out";
};

struct StoppingConfig {
  double D_stop = 1e-10;
  double d_stop = 1e-8;
  double T_win = 1.0;
  bool stop_on_convergence = true;
};

struct StationaryConfig {
  StationaryMethod method = StationaryMethod::gradient_flow;
  double tol = 1e-9;
  int max_iter = 50;
  double zero_tol = 0.0;  // 0: 1e-8 * lambda_max
  int eigen_count = 8;
  bool check_large_L = true;
};

struct SmallEnergyConfig {
  std::optional<double> kappa;  // empty: the family's pair
  std::optional<double> sigma;
  double epsilon = 1e-2;
};

struct RunConfig {
  Grid grid{64, 64, BcMode::periodic};
  ModelParams params;
  SchemeConfig scheme;
  InitSpec init;
  OutputConfig output;
  StoppingConfig stopping;
  StationaryConfig stationary;
  SmallEnergyConfig small_energy;

  RunSchedule schedule() const;
  StepOptions step_options() const;
};

/// Parses and validates a configuration object. Every section and key is
/// optional; unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
/// Full effective configuration, defaults included.
nlohmann::ordered_json config_to_json(const RunConfig& config);

}  // namespace nematic
