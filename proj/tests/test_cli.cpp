#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "nematic/cli.hpp"
#include "nematic/io.hpp"

using namespace nematic;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "nematic_cli_test";

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result invoke(const std::string& args, const std::string& env = "") {
  const fs::path out = kRoot / "stdout.txt", err = kRoot / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" NEMATIC_CLI_PATH "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_config(const std::string& name, const json& j) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / (name + ".json");
  std::ofstream(p) << j.dump(2);
  return p;
}

json small_config(const std::string& kind = "perturbed_unit") {
  return json{{"grid", {{"nx", 16}, {"ny", 16}}},
              {"params", {{"L", 0.5}}},
              {"init", {{"kind", kind}, {"seed", 7}, {"amplitude", 0.2}, {"velocity_energy", 0.02}}},
              {"scheme", {{"t_end", 40.0}}},
              {"output", {{"snapshot_every", 10}}}};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

json verdict(const json& report, const std::string& id) {
  for (const auto& v : report["verdicts"]) {
    if (v["theorem_id"] == id) return v;
  }
  FAIL("missing verdict " << id);
  return {};
}

struct Fresh {
  Fresh() {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
  }
};

}  // namespace

TEST_CASE("parse_config defaults and round trip") {
  const RunConfig c = parse_config(json::object());
  CHECK(c.grid == Grid(64, 64, BcMode::periodic));
  CHECK(c.params.L == 1.0);
  CHECK(c.stopping.D_stop == 1e-10);
  CHECK(c.stopping.d_stop == 1e-8);
  CHECK(c.stopping.T_win == 1.0);
  CHECK_FALSE(c.scheme.budget_tol.has_value());
  const json full = config_to_json(parse_config(small_config()));
  CHECK(json(config_to_json(parse_config(full))) == full);
}

TEST_CASE("config errors name the offending field") {
  auto field_of = [](const json& j) {
    try {
      parse_config(j);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  CHECK(field_of({{"grid", {{"bc_mode", "dirichlet_neumann"}, {"nx", 16}, {"ny", 16}}}, {"params", {{"delta", 1.0}}}}) ==
        "params.delta");
  CHECK(field_of({{"grid", {{"nx", 48}}}}) == "grid.nx");
  CHECK(field_of({{"grid", {{"nz", 4}}}}) == "grid.nz");
  CHECK(field_of({{"colour", 1}}) == "colour");
  CHECK(field_of({{"params", {{"L", -1.0}}}}) == "params.L");
  CHECK(field_of({{"params", {{"potential", {{"family", "quartic"}}}}}}) == "params.potential.family");
  CHECK(field_of({{"params", {{"potential", {{"c_psi", 0.5}}}}}}) == "params.potential");
  CHECK(field_of({{"init", {{"seed", -3}}}}) == "init.seed");
  CHECK(field_of({{"scheme", {{"budget_tol", "whatever"}}}}) == "scheme.budget_tol");
  CHECK(field_of({{"scheme", {{"t_end", "long"}}}}) == "scheme.t_end");
  CHECK(field_of({{"stationary", {{"method", "shooting"}}}}) == "stationary.method");
}

TEST_CASE("out dir precedence: flag, then OUT_DIR, then config") {
  RunConfig c;
  c.output.out_dir = "from_config";
  ::unsetenv("OUT_DIR");
  CHECK(cli::resolve_out_dir(c, "") == fs::path("from_config"));
  ::setenv("OUT_DIR", "from_env", 1);
  CHECK(cli::resolve_out_dir(c, "") == fs::path("from_env"));
  CHECK(cli::resolve_out_dir(c, "from_flag") == fs::path("from_flag"));
  ::unsetenv("OUT_DIR");
}

TEST_CASE("usage errors") {
  Fresh fresh;
  CHECK(invoke("").code == 2);
  CHECK(invoke("frobnicate").code == 2);
  CHECK(invoke("simulate").code == 2);
  CHECK(invoke("--help").code == 0);
  CHECK(invoke("simulate --config \"" + (kRoot / "missing.json").string() + "\"").code == 2);
  std::ofstream(kRoot / "broken.json") << "{ not json";
  CHECK(invoke("simulate --config \"" + (kRoot / "broken.json").string() + "\"").code == 2);
}

TEST_CASE("simulate rejects stretching with walls") {
  Fresh fresh;
  json j = small_config();
  j["grid"]["bc_mode"] = "dirichlet_neumann";
  j["params"]["delta"] = 1.0;
  const Result r = invoke("simulate --config \"" + write_config("bad", j).string() + "\" --out \"" +
                          (kRoot / "bad").string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("params.delta") != std::string::npos);
  CHECK(r.err.find("dirichlet_neumann") != std::string::npos);
  CHECK_FALSE(fs::exists(kRoot / "bad" / "trajectory.csv"));
}

TEST_CASE("simulate a stationary start") {
  Fresh fresh;
  json j = small_config("unit");
  j["init"]["velocity_energy"] = 0.0;
  const fs::path out = kRoot / "unit";
  const Result r = invoke("simulate --quiet --config \"" + write_config("unit", j).string() + "\" --out \"" + out.string() + "\"");
  REQUIRE(r.code == 0);
  const auto rows = read_trajectory_csv(out / "trajectory.csv");
  REQUIRE(rows.size() >= 2);
  for (const auto& row : rows) {
    CHECK(std::abs(row.total_energy) <= 1e-15);
    CHECK(row.dissipation <= 1e-20);
    CHECK(row.max_abs_d == doctest::Approx(1.0));
  }
  CHECK(read_json(out / "metadata.json")["run"]["outcome"] == "converged");

  SUBCASE("analyze: every applicable verdict passes") {
    const Result a = invoke("analyze --quiet \"" + out.string() + "\"");
    REQUIRE(a.code == 0);
    const json v = read_json(out / "verdicts.json");
    CHECK(v["verdicts"].size() == 8);
    for (const auto& e : v["verdicts"]) {
      INFO(e["theorem_id"].get<std::string>());
      CHECK((e["status"] == "pass" || e["status"] == "not_applicable"));
    }
    CHECK(verdict(v, "omega_limit")["status"] == "pass");
    CHECK(verdict(v, "small_energy")["status"] == "pass");
  }
}

TEST_CASE("simulate writes documented, reproducible artifacts") {
  Fresh fresh;
  const fs::path cfg = write_config("run", small_config());
  const fs::path a = kRoot / "a", b = kRoot / "b";
  REQUIRE(invoke("simulate --quiet --config \"" + cfg.string() + "\" --out \"" + a.string() + "\"").code == 0);
  REQUIRE(invoke("simulate --quiet --config \"" + cfg.string() + "\" --out \"" + b.string() + "\"").code == 0);

  for (const char* f : {"config.json", "metadata.json", "trajectory.csv", "snapshots/index.csv"})
    CHECK(fs::exists(a / f));
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK(slurp(a / "trajectory.csv").rfind(std::string(kTrajectoryHeader) + "\n", 0) == 0);
  CHECK(slurp(a / "snapshots" / "index.csv") == slurp(b / "snapshots" / "index.csv"));

  const json meta = read_json(a / "metadata.json");
  CHECK(meta["seed"] == 7);
  CHECK(meta["grid"]["nx"] == 16);
  CHECK(meta["config_hash"] == git_blob_hash(slurp(a / "config.json")));
  CHECK(meta["config_hash"].get<std::string>().size() == 40);
  CHECK(meta["trajectory_header"] == kTrajectoryHeader);

  // every frame listed in the index has its binary and sidecar
  std::istringstream index(slurp(a / "snapshots" / "index.csv"));
  std::string line;
  std::getline(index, line);
  CHECK(line == "frame,t,file");
  int frames = 0;
  while (std::getline(index, line)) {
    const std::string file = line.substr(line.rfind(',') + 1);
    CHECK(fs::exists(a / "snapshots" / (file + ".bin")));
    CHECK(fs::exists(a / "snapshots" / (file + ".json")));
    ++frames;
  }
  CHECK(frames >= 2);

  SUBCASE("the config hash agrees with git when available") {
    if (std::system("git --version >/dev/null 2>&1") == 0) {
      const std::string cmd = "git hash-object \"" + (a / "config.json").string() + "\" > \"" +
                              (kRoot / "hash.txt").string() + "\"";
      REQUIRE(std::system(cmd.c_str()) == 0);
      std::string h = slurp(kRoot / "hash.txt");
      h.erase(h.find_last_not_of("\n") + 1);
      CHECK(h == meta["config_hash"].get<std::string>());
    }
  }

  SUBCASE("analyze reconstructs the verdicts from the artifacts") {
    const fs::path report = kRoot / "report";
    const Result r = invoke("analyze --quiet \"" + a.string() + "\" --out \"" + report.string() + "\"");
    REQUIRE(r.code == 0);
    const json v = read_json(report / "verdicts.json");
    CHECK(verdict(v, "max_principle")["status"] == "pass");
    CHECK(verdict(v, "energy_inequality")["status"] == "pass");
    CHECK(fs::exists(report / "verdicts.txt"));
    CHECK(fs::exists(report / "plot.csv"));
    // pure function of the artifacts
    const fs::path again = kRoot / "again";
    REQUIRE(invoke("analyze --quiet \"" + a.string() + "\" --out \"" + again.string() + "\"").code == 0);
    CHECK(slurp(report / "verdicts.json") == slurp(again / "verdicts.json"));
    CHECK(slurp(report / "plot.csv") == slurp(again / "plot.csv"));
  }

  SUBCASE("analyze reports every missing or corrupt file") {
    fs::remove(a / "trajectory.csv");
    std::ofstream(a / "metadata.json") << "{";
    const Result r = invoke("analyze \"" + a.string() + "\"");
    CHECK(r.code == 4);
    CHECK(r.err.find("trajectory.csv") != std::string::npos);
    CHECK(r.err.find("metadata.json") != std::string::npos);
    CHECK(invoke("analyze \"" + (kRoot / "nowhere").string() + "\"").code == 4);
  }
}

TEST_CASE("analyze marks the maximum principle not applicable with stretching") {
  Fresh fresh;
  json j = small_config();
  j["params"]["delta"] = 1.0;
  const fs::path out = kRoot / "stretch";
  REQUIRE(invoke("simulate --quiet --config \"" + write_config("s", j).string() + "\" --out \"" + out.string() + "\"").code == 0);
  REQUIRE(invoke("analyze --quiet \"" + out.string() + "\"").code == 0);
  const json v = read_json(out / "verdicts.json");
  CHECK(verdict(v, "max_principle")["status"] == "not_applicable");
  CHECK(verdict(v, "small_energy")["status"] == "not_applicable");
  CHECK(verdict(v, "energy_inequality")["status"] == "pass");
}

TEST_CASE("OUT_DIR is used when --out is absent") {
  Fresh fresh;
  json j = small_config();
  j["scheme"]["t_end"] = 0.2;
  j["output"]["out_dir"] = (kRoot / "from_config").string();
  const fs::path cfg = write_config("env", j);
  const fs::path env_dir = kRoot / "from_env";
  REQUIRE(invoke("simulate --quiet --config \"" + cfg.string() + "\"", "OUT_DIR=\"" + env_dir.string() + "\"").code == 0);
  CHECK(fs::exists(env_dir / "trajectory.csv"));
  CHECK_FALSE(fs::exists(kRoot / "from_config"));
  REQUIRE(invoke("simulate --quiet --config \"" + cfg.string() + "\"", "env -u OUT_DIR").code == 0);
  CHECK(fs::exists(kRoot / "from_config" / "trajectory.csv"));
}

TEST_CASE("stationary subcommand") {
  Fresh fresh;
  auto run_stationary = [](const std::string& name, const json& j) {
    const fs::path out = kRoot / name;
    const Result r = invoke("stationary --quiet --config \"" + write_config(name, j).string() + "\" --out \"" + out.string() + "\"");
    REQUIRE(r.code == 0);
    CHECK(fs::exists(out / "equilibrium.bin"));
    return read_json(out / "stationary.json");
  };
  SUBCASE("constant unit start") {
    const json s = run_stationary("unit", small_config("unit"));
    CHECK(s["report"]["kernel_dim"] == 1);
    CHECK(s["report"]["classification"] == "constant_unit");
    CHECK(s["report"]["converged"] == true);
  }
  SUBCASE("zero start") {
    const json s = run_stationary("zero", small_config("zero"));
    CHECK(s["report"]["classification"] == "zero");
    CHECK(s["report"]["kernel_dim"] == 0);
  }
  SUBCASE("L below the threshold records a failed criterion") {
    json j = small_config("unit");
    j["params"]["L"] = 0.01;
    const json s = run_stationary("low_L", j);
    bool found = false;
    for (const auto& c : s["criteria"]) {
      if (c["name"] == "large_L") {
        found = true;
        CHECK(c["pass"] == false);
        CHECK(c["metrics"]["threshold"].get<double>() == doctest::Approx(0.02533).epsilon(1e-3));
      }
    }
    CHECK(found);
  }
  SUBCASE("newton from a perturbed start") {
    json j = small_config();
    j["stationary"] = {{"method", "newton"}};
    const json s = run_stationary("newton", j);
    CHECK(s["report"]["residual_norm"].get<double>() <= 1e-9);
    CHECK(s["report"]["classification"] == "constant_unit");
  }
}

TEST_CASE("sweeps") {
  Fresh fresh;
  auto rows_of = [](const fs::path& csv) {
    std::istringstream in(slurp(csv));
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string c;
      while (std::getline(ss, c, ',')) cells.push_back(c);
      if (line.back() == ',') cells.emplace_back();
      rows.push_back(cells);
    }
    return rows;
  };
  json j = small_config("random");
  j["init"]["amplitude"] = 1.0;
  j["scheme"]["t_end"] = 200.0;

  SUBCASE("L axis") {
    const fs::path out = kRoot / "sweep_L";
    const Result r = invoke("sweep --quiet --jobs 2 --config \"" + write_config("sL", j).string() + "\" --axis L --values 0.01,0.05,1.0 --out \"" + out.string() + "\"");
    REQUIRE(r.code == 0);
    const auto rows = rows_of(out / "sweep.csv");
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
      REQUIRE(row.size() == 18);
      CHECK(row[4] == "ok");
      CHECK(fs::exists(out / row[3] / "trajectory.csv"));
    }
    // above the threshold only constants survive
    CHECK(rows[1][7] != "other");
    CHECK(rows[2][7] != "other");
  }
  SUBCASE("seed axis is deterministic") {
    const fs::path out = kRoot / "sweep_seed";
    j["scheme"]["t_end"] = 2.0;
    REQUIRE(invoke("sweep --quiet --jobs 2 --config \"" + write_config("ss", j).string() + "\" --axis seed --values 3,3,4 --out \"" + out.string() + "\"").code == 0);
    const auto rows = rows_of(out / "sweep.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][7] == rows[1][7]);
    CHECK(rows[0][10] == rows[1][10]);
    CHECK(slurp(out / "seed_000" / "trajectory.csv") == slurp(out / "seed_001" / "trajectory.csv"));
    CHECK(slurp(out / "seed_000" / "trajectory.csv") != slurp(out / "seed_002" / "trajectory.csv"));
  }
  SUBCASE("delta axis keeps the energy inequality") {
    const fs::path out = kRoot / "sweep_delta";
    j["init"]["kind"] = "perturbed_unit";
    j["init"]["amplitude"] = 0.3;
    j["scheme"]["t_end"] = 5.0;
    REQUIRE(invoke("sweep --quiet --config \"" + write_config("sd", j).string() + "\" --axis delta --values 0,0.5,1 --out \"" + out.string() + "\"").code == 0);
    const auto rows = rows_of(out / "sweep.csv");
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
      CHECK(row[4] == "ok");
      CHECK(row[15] == "pass");
    }
    CHECK(rows[0][16] == "pass");
    CHECK(rows[2][16] == "not_applicable");
  }
  SUBCASE("per-run failures are recorded and the sweep continues") {
    const fs::path out = kRoot / "sweep_bad";
    j["grid"]["bc_mode"] = "dirichlet_neumann";
    j["scheme"]["t_end"] = 0.5;
    REQUIRE(invoke("sweep --quiet --config \"" + write_config("sb", j).string() + "\" --axis delta --values 0,1 --out \"" + out.string() + "\"").code == 0);
    const auto rows = rows_of(out / "sweep.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][4] == "ok");
    CHECK(rows[1][4] == "config_error");
    CHECK(rows[1][5] == "2");
    CHECK(rows[1][17].find("params.delta") != std::string::npos);
  }
  SUBCASE("bad axis") {
    CHECK(invoke("sweep --config \"" + write_config("sx", j).string() + "\" --axis nu --values 1").code == 2);
  }
}
