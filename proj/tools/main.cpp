#include <iostream>

#include "CLI11.hpp"
#include "nematic/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = nematic::cli;
  CLI::App app{"Nematic liquid-crystal flow simulator and equilibrium analyzer"};
  app.require_subcommand(1);

  cli::CommonOptions opt;
  std::string config, run_dir, axis;
  std::vector<double> values;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out, "Output directory (overrides OUT_DIR and output.out_dir)");
    sub->add_flag("--quiet", opt.quiet, "Suppress progress output");
  };

  auto* sim = app.add_subcommand("simulate", "Integrate the coupled system");
  sim->add_option("--config", config, "Run configuration (JSON)")->required();
  add_common(sim);

  auto* sta = app.add_subcommand("stationary", "Solve the stationary problem and count the kernel");
  sta->add_option("--config", config, "Run configuration (JSON)")->required();
  add_common(sta);

  auto* ana = app.add_subcommand("analyze", "Emit theorem verdicts for a finished run");
  ana->add_option("run_dir", run_dir, "Directory written by simulate")->required();
  add_common(ana);

  auto* swp = app.add_subcommand("sweep", "Run independent simulations over one parameter");
  swp->add_option("--config", config, "Base configuration (JSON)")->required();
  swp->add_option("--axis", axis, "Swept parameter")->required()->check(
      CLI::IsMember({"L", "delta", "seed"}));
  swp->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  swp->add_option("--jobs", opt.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  add_common(swp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::exit_config;
  }

  if (sim->parsed()) return cli::simulate(config, opt);
  if (sta->parsed()) return cli::stationary(config, opt);
  if (ana->parsed()) return cli::analyze(run_dir, opt);
  return cli::sweep(config, axis, values, opt);
}
