#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nematic/config.hpp"
#include "nematic/diagnostics.hpp"

namespace nematic::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_config = 2,
  exit_blow_up = 3,
  exit_analysis_input = 4
};

struct CommonOptions {
  std::string out;  // --out; empty falls back to OUT_DIR, then output.out_dir
  int jobs = 1;
  bool quiet = false;
};

/// --out, then the OUT_DIR environment variable, then output.out_dir.
std::filesystem::path resolve_out_dir(const RunConfig& config, const std::string& flag);

struct SimulationOutcome {
  int exit_code = exit_ok;
  RunResult result;
  std::string error;
};

/// Runs dynamics::run and writes config.json, metadata.json, trajectory.csv
/// and snapshots/ (index.csv plus one snapshot per frame) into out_dir.
SimulationOutcome simulate_to(const RunConfig& config, const std::filesystem::path& out_dir,
                              const std::string& source_text, bool quiet);

struct AnalysisInput {
  RunConfig config;
  TrajectoryLog log;  // reports, frames and run info
  State initial;
  State final_state;
};

/// Reloads a run directory. Throws std::runtime_error listing every missing
/// or corrupt file.
AnalysisInput load_run(const std::filesystem::path& run_dir);

/// All applicable verdicts for a loaded run, in a fixed order.
std::vector<TheoremVerdict> analyze_run(const AnalysisInput& input, DecayFit* fit = nullptr,
                                        std::vector<double>* distances = nullptr);

int simulate(const std::filesystem::path& config_path, const CommonOptions& opt);
int stationary(const std::filesystem::path& config_path, const CommonOptions& opt);
int analyze(const std::filesystem::path& run_dir, const CommonOptions& opt);
/// axis is L, delta or seed.
int sweep(const std::filesystem::path& config_path, const std::string& axis,
          const std::vector<double>& values, const CommonOptions& opt);

}  // namespace nematic::cli
