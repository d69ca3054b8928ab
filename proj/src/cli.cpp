#include "nematic/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "nematic/io.hpp"
#include "nematic/snapshot.hpp"

namespace nematic::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string frame_name(int frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d", frame);
  return buf;
}

Snapshot state_snapshot(const Grid& g, const State& s) {
  Snapshot snap;
  snap.grid = g;
  snap.time = s.t;
  snap.component_names = {"d_x", "d_y", "u_x", "u_y", "p"};
  snap.components = {s.d.c[0], s.d.c[1], s.u.c[0], s.u.c[1],
                     s.p.v.empty() ? Samples(g.size(), 0.0) : s.p.v};
  return snap;
}

State state_from_snapshot(const Snapshot& snap) {
  if (snap.components.size() != 5) throw std::runtime_error("expected 5 components");
  State s;
  s.t = snap.time;
  s.d = VectorField(snap.grid, FieldRole::director);
  s.u = VectorField(snap.grid, FieldRole::velocity);
  s.d.c = {snap.components[0], snap.components[1]};
  s.u.c = {snap.components[2], snap.components[3]};
  s.p.v = snap.components[4];
  return s;
}

std::array<double, 2> small_energy_pair(const RunConfig& c) {
  const auto family = Potential(c.params.potential).lower_bound_pair();
  return {c.small_energy.kappa.value_or(family[0]), c.small_energy.sigma.value_or(family[1])};
}

}  // namespace

fs::path resolve_out_dir(const RunConfig& config, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("OUT_DIR"); env && *env) return env;
  return config.output.out_dir;
}

SimulationOutcome simulate_to(const RunConfig& config, const fs::path& out_dir,
                              const std::string& source_text, bool quiet) {
  SimulationOutcome out;
  fs::create_directories(out_dir / "snapshots");
  const std::string config_text = config_to_json(config).dump(2) + "\n";
  write_text(out_dir / "config.json", config_text);

  const Model model(config.grid, config.params, config.step_options());
  const State s0 = make_initial_state(model, config.init);

  std::string index = "frame,t,file\n";
  RunSchedule schedule = config.schedule();
  schedule.keep_frames = false;
  schedule.on_frame = [&](const State& s, int frame) {
    const std::string name = frame_name(frame);
    write_snapshot(out_dir / "snapshots" / name, state_snapshot(config.grid, s));
    index += std::to_string(frame) + "," + fmt("%.17g", s.t) + "," + name + "\n";
  };
  out.result = run(model, s0, schedule);
  const RunInfo& info = out.result.log.info;
  write_text(out_dir / "snapshots" / "index.csv", index);
  write_text(out_dir / "trajectory.csv", trajectory_csv(out.result.log.reports));

  ojson meta;
  meta["format"] = "nematic-run/1";
  meta["command"] = "simulate";
  meta["config_hash"] = git_blob_hash(config_text);
  meta["source_config_hash"] = source_text.empty() ? "" : git_blob_hash(source_text);
  meta["seed"] = config.init.seed;
  meta["grid"] = {{"nx", config.grid.nx}, {"ny", config.grid.ny},
                  {"bc_mode", to_string(config.grid.bc)}};
  meta["params"] = config_to_json(config)["params"];
  meta["scheme"] = {{"name", "semi-implicit first order: implicit diffusion, viscosity and "
                             "director transport; explicit bulk force, stresses and convection; "
                             "Leray projection"},
                    {"dt", info.dt},
                    {"cfl_safety", config.scheme.cfl_safety},
                    {"budget_constant", info.budget_constant},
                    {"budget_tol", info.budget_tol},
                    {"calibration_steps", config.scheme.calibration_steps},
                    {"budget_factor", config.scheme.budget_factor},
                    {"budget_floor", config.scheme.budget_floor}};
  meta["run"] = run_info_to_json(info);
  meta["t_final"] = out.result.final_state.t;
  meta["files"] = {{"config", "config.json"},
                   {"trajectory", "trajectory.csv"},
                   {"snapshot_index", "snapshots/index.csv"}};
  meta["trajectory_header"] = kTrajectoryHeader;
  write_text(out_dir / "metadata.json", meta.dump(2) + "\n");

  if (!quiet) {
    const auto& last = out.result.log.reports.back();
    std::printf("simulate: %s after %ld steps, t = %.6g, EE = %.10g, D = %.3e\n",
                to_string(info.outcome).c_str(), info.steps, last.t, last.total_energy,
                last.dissipation);
  }
  if (info.outcome == RunOutcome::blow_up) {
    out.exit_code = exit_blow_up;
    out.error = info.message;
  }
  return out;
}

int simulate(const fs::path& config_path, const CommonOptions& opt) {
  RunConfig config;
  std::string source;
  try {
    config = load_config(config_path);
    source = read_text(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  }
  try {
    const auto out = simulate_to(config, resolve_out_dir(config, opt.out), source, opt.quiet);
    if (out.exit_code == exit_blow_up) std::cerr << "blow-up: " << out.error << "\n";
    return out.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

int stationary(const fs::path& config_path, const CommonOptions& opt) {
  RunConfig config;
  std::string source;
  try {
    config = load_config(config_path);
    source = read_text(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  }
  try {
    const fs::path out_dir = resolve_out_dir(config, opt.out);
    fs::create_directories(out_dir);
    const std::string config_text = config_to_json(config).dump(2) + "\n";
    write_text(out_dir / "config.json", config_text);

    StepOptions so = config.step_options();
    so.freeze_velocity = true;
    const Model model(config.grid, config.params, so);
    const State s0 = make_initial_state(model, config.init);

    StationaryOptions sopt;
    sopt.method = config.stationary.method;
    sopt.tol = config.stationary.tol;
    sopt.max_iter = config.stationary.max_iter;
    sopt.kernel.zero_tol = config.stationary.zero_tol;
    sopt.kernel.count = config.stationary.eigen_count;
    const StationaryReport rep = solve_stationary(model, s0.d, sopt);
    if (!all_finite(rep.z)) {
      std::cerr << "blow-up: stationary iterate is not finite\n";
      return exit_blow_up;
    }
    write_snapshot(out_dir / "equilibrium", director_snapshot(config.grid, 0.0, rep.z));

    ojson j;
    j["format"] = "nematic-stationary/1";
    j["config_hash"] = git_blob_hash(config_text);
    j["source_config_hash"] = git_blob_hash(source);
    ojson r;
    r["converged"] = rep.converged;
    r["residual_norm"] = rep.residual_norm;
    r["energy"] = rep.energy;
    r["classification"] = to_string(rep.classification);
    r["kernel_dim"] = rep.kernel_dim;
    ojson spec = ojson::array();
    for (const auto& e : rep.low_spectrum) {
      spec.push_back({{"eigenvalue", e.value}, {"multiplicity", e.multiplicity}});
    }
    r["low_spectrum"] = spec;
    r["eigenvalues"] = rep.eigenvalues;
    r["smallest_nonzero_eigenvalue"] = rep.smallest_nonzero;
    r["method_used"] = rep.method_used;
    r["iterations"] = rep.iterations;
    r["message"] = rep.message;
    r["equilibrium"] = "equilibrium";
    j["report"] = r;

    ojson criteria = ojson::array();
    auto crit_json = [](const CriterionReport& c) {
      ojson m = ojson::object();
      for (const auto& [k, v] : c.metrics) m[k] = v;
      return ojson{{"name", c.name}, {"pass", c.pass}, {"metrics", m}, {"notes", c.notes}};
    };
    if (config.stationary.check_large_L) criteria.push_back(crit_json(check_large_L(config.params, config.grid)));
    if (config.params.delta == 0.0 && max_magnitude(s0.d) <= 1.0 + 1e-12) {
      const auto [kappa, sigma] = small_energy_pair(config);
      criteria.push_back(
          crit_json(check_small_energy(model, s0, kappa, sigma, config.small_energy.epsilon)));
    } else {
      criteria.push_back({{"name", "small_energy"},
                          {"pass", false},
                          {"applicable", false},
                          {"notes", "requires delta = 0 and max |d0| <= 1"}});
    }
    j["criteria"] = criteria;
    write_text(out_dir / "stationary.json", j.dump(2) + "\n");
    if (!opt.quiet) {
      std::printf("stationary: %s, residual %.3e, classification %s, kernel_dim %d\n",
                  rep.converged ? "converged" : "not converged", rep.residual_norm,
                  to_string(rep.classification).c_str(), rep.kernel_dim);
    }
    return exit_ok;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

AnalysisInput load_run(const fs::path& dir) {
  AnalysisInput in;
  std::vector<std::string> errors;
  auto attempt = [&](auto&& fn) {
    try {
      fn();
      return true;
    } catch (const std::exception& e) {
      errors.emplace_back(e.what());
      return false;
    }
  };
  const bool have_config = attempt([&] {
    const fs::path p = dir / "config.json";
    try {
      in.config = parse_config(nlohmann::json::parse(read_text(p)));
    } catch (const std::exception& e) {
      const std::string what = e.what();
      throw std::runtime_error(what.rfind(p.string(), 0) == 0 ? what : p.string() + ": " + what);
    }
  });
  attempt([&] {
    const fs::path p = dir / "metadata.json";
    try {
      const auto meta = nlohmann::json::parse(read_text(p));
      in.log.info = run_info_from_json(meta.at("run"));
    } catch (const std::exception& e) {
      const std::string what = e.what();
      throw std::runtime_error(what.rfind(p.string(), 0) == 0 ? what : p.string() + ": " + what);
    }
  });
  attempt([&] { in.log.reports = read_trajectory_csv(dir / "trajectory.csv"); });
  attempt([&] {
    const fs::path p = dir / "snapshots" / "index.csv";
    std::ifstream idx(p);
    if (!idx) throw std::runtime_error(p.string() + ": missing");
    std::string line;
    std::getline(idx, line);
    if (line != "frame,t,file") throw std::runtime_error(p.string() + ": unexpected header");
    std::vector<std::string> frame_errors;
    while (std::getline(idx, line)) {
      if (line.empty()) continue;
      const auto c2 = line.rfind(',');
      const std::string name = line.substr(c2 + 1);
      try {
        const Snapshot snap = read_snapshot(dir / "snapshots" / name);
        if (have_config && !(snap.grid == in.config.grid)) {
          throw std::runtime_error((dir / "snapshots" / name).string() +
                                   ": grid does not match config.json");
        }
        State s = state_from_snapshot(snap);
        if (in.log.frames.empty()) in.initial = s;
        in.log.frames.push_back({s.t, s.d});
        in.final_state = std::move(s);
      } catch (const std::exception& e) {
        frame_errors.emplace_back(e.what());
      }
    }
    if (!frame_errors.empty()) {
      std::string all;
      for (const auto& e : frame_errors) all += (all.empty() ? "" : "\n") + e;
      throw std::runtime_error(all);
    }
    if (in.log.frames.empty()) throw std::runtime_error(p.string() + ": no frames");
  });
  if (!errors.empty()) {
    std::string all;
    for (const auto& e : errors) all += (all.empty() ? "" : "\n") + e;
    throw std::runtime_error(all);
  }
  return in;
}

std::vector<TheoremVerdict> analyze_run(const AnalysisInput& in, DecayFit* fit,
                                        std::vector<double>* distances) {
  const Model model(in.config.grid, in.config.params, in.config.step_options());
  std::vector<TheoremVerdict> v;
  v.push_back(energy_monotonicity_check(in.log));
  v.push_back(max_principle_check(in.log));
  v.push_back(omega_limit_check(in.log, in.final_state, model));
  v.push_back(single_point_check(in.log));
  DecayFit f;
  v.push_back(decay_fit(in.log, in.final_state.d, model, {}, &f));
  if (fit) *fit = f;
  if (distances) *distances = distances_to(in.log, in.final_state.d);
  v.push_back(dissipation_bound_check(in.log));
  v.push_back(verdict_from_criterion(TheoremId::large_L, check_large_L(in.config.params, in.config.grid)));
  if (in.config.params.delta == 0.0 && max_magnitude(in.initial.d) <= 1.0 + 1e-12) {
    const auto [kappa, sigma] = small_energy_pair(in.config);
    v.push_back(verdict_from_criterion(
        TheoremId::small_energy,
        check_small_energy(model, in.initial, kappa, sigma, in.config.small_energy.epsilon)));
  } else {
    TheoremVerdict na;
    na.id = TheoremId::small_energy;
    na.status = VerdictStatus::not_applicable;
    na.metrics = {{"delta", in.config.params.delta}, {"d0_max", max_magnitude(in.initial.d)}};
    na.notes = "requires delta = 0 and max |d0| <= 1";
    v.push_back(na);
  }
  return v;
}

int analyze(const fs::path& run_dir, const CommonOptions& opt) {
  AnalysisInput in;
  try {
    in = load_run(run_dir);
  } catch (const std::exception& e) {
    std::cerr << "analysis input error:\n" << e.what() << "\n";
    return exit_analysis_input;
  }
  try {
    DecayFit fit;
    std::vector<double> dist;
    const auto verdicts = analyze_run(in, &fit, &dist);
    const fs::path out = opt.out.empty() ? run_dir : fs::path(opt.out);
    fs::create_directories(out);
    write_text(out / "verdicts.json", verdicts_json(verdicts));
    const std::string table = verdicts_table(verdicts);
    write_text(out / "verdicts.txt", table);
    write_text(out / "plot.csv", plot_csv(in.log, dist, fit));
    if (!opt.quiet) std::cout << table;
    return exit_ok;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

int sweep(const fs::path& config_path, const std::string& axis, const std::vector<double>& values,
          const CommonOptions& opt) {
  RunConfig base;
  std::string source;
  try {
    base = load_config(config_path);
    source = read_text(config_path);
    if (axis != "L" && axis != "delta" && axis != "seed") {
      throw ConfigError("--axis", "must be L, delta or seed");
    }
    if (values.empty()) throw ConfigError("--values", "must list at least one value");
    if (opt.jobs < 1) throw ConfigError("--jobs", "must be >= 1");
    if (axis == "seed") {
      for (double v : values) {
        if (v < 0.0 || std::floor(v) != v) throw ConfigError("--values", "seeds must be integers >= 0");
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  }
  const fs::path out_dir = resolve_out_dir(base, opt.out);
  fs::create_directories(out_dir);

  struct Row {
    std::string status = "pending", outcome, classification, error;
    int exit_code = 0;
    double t_final = NAN, energy = NAN, dissipation = NAN, max_d = NAN, residual = NAN,
           grad_u = NAN;
    long steps = 0;
    std::string energy_verdict, max_principle_verdict;
  };
  std::vector<Row> rows(values.size());
  std::atomic<std::size_t> next{0};
  std::mutex print_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      Row& row = rows[i];
      char name[64];
      std::snprintf(name, sizeof name, "%s_%03zu", axis.c_str(), i);
      try {
        nlohmann::json j = config_to_json(base);
        if (axis == "L") j["params"]["L"] = values[i];
        if (axis == "delta") j["params"]["delta"] = values[i];
        if (axis == "seed") j["init"]["seed"] = static_cast<long long>(values[i]);
        RunConfig cfg;
        try {
          cfg = parse_config(j);
        } catch (const ConfigError& e) {
          row.status = "config_error";
          row.exit_code = exit_config;
          row.error = e.what();
          continue;
        }
        const auto res = simulate_to(cfg, out_dir / name, source, true);
        const Model model(cfg.grid, cfg.params, cfg.step_options());
        const auto& log = res.result.log;
        const State& fin = res.result.final_state;
        row.exit_code = res.exit_code;
        row.status = res.exit_code == exit_ok ? "ok" : "blow_up";
        row.outcome = to_string(log.info.outcome);
        row.classification = to_string(classify(fin.d));
        row.t_final = fin.t;
        row.steps = log.info.steps;
        row.energy = log.reports.back().total_energy;
        row.dissipation = log.reports.back().dissipation;
        row.residual = norm(stationary_residual(model, fin.d));
        row.grad_u = std::sqrt(std::max(0.0, -inner(model.ops().laplacian(fin.u), fin.u)));
        row.max_d = 0.0;
        for (const auto& r : log.reports) row.max_d = std::max(row.max_d, r.max_abs_d);
        row.energy_verdict = to_string(energy_monotonicity_check(log).status);
        row.max_principle_verdict = to_string(max_principle_check(log).status);
        row.error = res.error;
      } catch (const std::exception& e) {
        row.status = "error";
        row.exit_code = exit_failure;
        row.error = e.what();
      }
      if (!opt.quiet) {
        std::lock_guard<std::mutex> lock(print_mutex);
        std::printf("sweep %s = %.6g: %s %s %s\n", axis.c_str(), values[i], row.status.c_str(),
                    row.outcome.c_str(), row.classification.c_str());
        std::fflush(stdout);
      }
    }
  };
  const int jobs = std::min<int>(opt.jobs, static_cast<int>(values.size()));
  std::vector<std::thread> pool;
  for (int k = 1; k < jobs; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  auto csv_text = [](std::string s) {
    for (char& ch : s) {
      if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
    }
    return s;
  };
  std::string csv =
      "index,axis,value,run_dir,status,exit_code,outcome,classification,t_final,steps,"
      "final_energy,final_dissipation,max_abs_d,stationary_residual,grad_u_norm,"
      "energy_inequality,max_principle,error\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    char name[64];
    std::snprintf(name, sizeof name, "%s_%03zu", axis.c_str(), i);
    char buf[1024];
    std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%s,%s,%d,%s,%s,%.17g,%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%s,",
                  i, axis.c_str(), values[i], name, r.status.c_str(), r.exit_code,
                  r.outcome.c_str(), r.classification.c_str(), r.t_final, r.steps, r.energy,
                  r.dissipation, r.max_d, r.residual, r.grad_u, r.energy_verdict.c_str(),
                  r.max_principle_verdict.c_str());
    csv += buf + csv_text(r.error) + "\n";
  }
  write_text(out_dir / "sweep.csv", csv);
  return exit_ok;
}

}  // namespace nematic::cli
