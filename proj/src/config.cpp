#include "nematic/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace nematic {

namespace {

using json = nlohmann::json;

// Reads keys of one object section and rejects the ones nobody asked for.
class Section {
 public:
  Section(json root, std::string path) : root_(std::move(root)), path_(std::move(path)) {
    if (root_.is_null()) return;
    if (!root_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
    obj_ = &root_;
  }
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* get(const std::string& key) {
    seen_.insert(key);
    if (!obj_) return nullptr;
    auto it = obj_->find(key);
    if (it == obj_->end() || it->is_null()) return nullptr;
    return &*it;
  }

  json child(const std::string& key) {
    const json* v = get(key);
    return v ? *v : json();
  }

  double number(const std::string& key, double fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(field(key), "must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(field(key), "must be finite");
    return x;
  }

  std::optional<double> optional_number(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    return number(key, 0.0);
  }

  long long integer(const std::string& key, long long fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (v->is_number_integer() || v->is_number_unsigned()) return v->get<long long>();
    if (v->is_number_float()) {
      const double x = v->get<double>();
      if (std::floor(x) == x && std::abs(x) < 9e15) return static_cast<long long>(x);
    }
    throw ConfigError(field(key), "must be an integer");
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(field(key), "must be true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(field(key), "must be a string");
    return v->get<std::string>();
  }

  void finish() const {
    if (!obj_) return;
    for (auto it = obj_->begin(); it != obj_->end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

 private:
  json root_;
  const json* obj_ = nullptr;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace

RunSchedule RunConfig::schedule() const {
  RunSchedule s;
  s.dt = scheme.dt;
  s.dt_max = scheme.dt_max;
  s.t_end = scheme.t_end;
  s.cfl_safety = scheme.cfl_safety;
  s.budget_tol = scheme.budget_tol;
  s.calibration_steps = scheme.calibration_steps;
  s.budget_factor = scheme.budget_factor;
  s.budget_floor = scheme.budget_floor;
  s.cadence = output.cadence;
  s.snapshot_every = output.snapshot_every;
  s.D_stop = stopping.D_stop;
  s.d_stop = stopping.d_stop;
  s.T_win = stopping.T_win;
  s.stop_on_convergence = stopping.stop_on_convergence;
  return s;
}

StepOptions RunConfig::step_options() const {
  StepOptions o;
  o.freeze_velocity = scheme.director_only;
  return o;
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  Section root(j, "");

  {
    Section s(root.child("grid"), "grid");
    const long long nx = s.integer("nx", 64), ny = s.integer("ny", 64);
    BcMode bc;
    const std::string bc_name = s.text("bc_mode", "periodic");
    try {
      bc = bc_mode_from_string(bc_name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("grid.bc_mode", e.what());
    }
    require(nx >= 8 && nx <= 4096, "grid.nx", "must be in [8, 4096]");
    require(ny >= 8 && ny <= 4096, "grid.ny", "must be in [8, 4096]");
    if (bc == BcMode::periodic) {
      require((nx & (nx - 1)) == 0, "grid.nx", "must be a power of two in periodic mode");
      require((ny & (ny - 1)) == 0, "grid.ny", "must be a power of two in periodic mode");
    }
    c.grid = Grid(static_cast<int>(nx), static_cast<int>(ny), bc);
    s.finish();
  }

  {
    Section s(root.child("params"), "params");
    c.params.nu = s.number("nu", 1.0);
    c.params.L = s.number("L", 1.0);
    c.params.delta = s.number("delta", 0.0);
    require(c.params.nu > 0.0, "params.nu", "must be > 0");
    require(c.params.L > 0.0, "params.L", "must be > 0");
    require(c.params.delta >= 0.0, "params.delta", "must be >= 0");
    require(c.params.delta == 0.0 || c.grid.bc == BcMode::periodic, "params.delta",
            "delta > 0 requires grid.bc_mode = periodic (got dirichlet_neumann)");
    Section p(s.child("potential"), "params.potential");
    const std::string fam = p.text("family", "ginzburg_landau");
    try {
      c.params.potential.family = potential_family_from_string(fam);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("params.potential.family", e.what());
    }
    c.params.potential.a = p.number("a", 2.0);
    c.params.potential.c_psi = p.number("c_psi", 0.0);
    require(c.params.potential.a > 0.0, "params.potential.a", "must be > 0");
    p.finish();
    s.finish();
    const ValidationReport rep = validate(c.params.potential, 4.0);
    if (!rep.ok()) {
      throw ConfigError("params.potential", "violates hypothesis " + rep.first_failure());
    }
  }

  {
    Section s(root.child("scheme"), "scheme");
    c.scheme.dt = s.number("dt", 0.0);
    c.scheme.dt_max = s.number("dt_max", 0.02);
    c.scheme.t_end = s.number("t_end", 10.0);
    c.scheme.cfl_safety = s.number("cfl_safety", 0.5);
    const json* bt = s.get("budget_tol");
    if (bt && bt->is_string()) {
      require(bt->get<std::string>() == "calibrated", "scheme.budget_tol",
              "must be a positive number or \"calibrated\"");
    } else if (bt) {
      c.scheme.budget_tol = s.number("budget_tol", 0.0);
      require(*c.scheme.budget_tol > 0.0, "scheme.budget_tol", "must be > 0");
    }
    c.scheme.calibration_steps = static_cast<int>(s.integer("calibration_steps", 20));
    c.scheme.budget_factor = s.number("budget_factor", 10.0);
    c.scheme.budget_floor = s.number("budget_floor", 1e-14);
    c.scheme.director_only = s.boolean("director_only", false);
    require(c.scheme.dt >= 0.0, "scheme.dt", "must be >= 0 (0 selects the CFL step)");
    require(c.scheme.dt_max > 0.0, "scheme.dt_max", "must be > 0");
    require(c.scheme.t_end > 0.0, "scheme.t_end", "must be > 0");
    require(c.scheme.cfl_safety > 0.0 && c.scheme.cfl_safety <= 1.0, "scheme.cfl_safety",
            "must be in (0, 1]");
    require(c.scheme.calibration_steps >= 1, "scheme.calibration_steps", "must be >= 1");
    require(c.scheme.budget_factor > 0.0, "scheme.budget_factor", "must be > 0");
    require(c.scheme.budget_floor >= 0.0, "scheme.budget_floor", "must be >= 0");
    s.finish();
  }

  {
    Section s(root.child("init"), "init");
    try {
      c.init.kind = init_kind_from_string(s.text("kind", "perturbed_unit"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("init.kind", e.what());
    }
    const long long seed = s.integer("seed", 0);
    require(seed >= 0, "init.seed", "must be >= 0");
    c.init.seed = static_cast<std::uint64_t>(seed);
    c.init.amplitude = s.number("amplitude", 1e-2);
    c.init.k_max = static_cast<int>(s.integer("k_max", 4));
    c.init.angle = s.number("angle", 0.0);
    c.init.velocity_energy = s.number("velocity_energy", 0.0);
    c.init.clamp = s.boolean("clamp", true);
    c.init.core = s.number("core", 0.08);
    require(c.init.amplitude >= 0.0, "init.amplitude", "must be >= 0");
    require(c.init.k_max >= 0 && c.init.k_max <= 64, "init.k_max", "must be in [0, 64]");
    require(c.init.velocity_energy >= 0.0, "init.velocity_energy", "must be >= 0");
    require(c.init.core > 0.0, "init.core", "must be > 0");
    s.finish();
  }

  {
    Section s(root.child("output"), "output");
    c.output.cadence = static_cast<int>(s.integer("cadence", 1));
    c.output.snapshot_every = static_cast<int>(s.integer("snapshot_every", 20));
    c.output.out_dir = s.text("out_dir", "out");
    require(c.output.cadence >= 1, "output.cadence", "must be >= 1");
    require(c.output.snapshot_every >= 0, "output.snapshot_every", "must be >= 0");
    require(!c.output.out_dir.empty(), "output.out_dir", "must not be empty");
    s.finish();
  }

  {
    Section s(root.child("stopping"), "stopping");
    c.stopping.D_stop = s.number("D_stop", 1e-10);
    c.stopping.d_stop = s.number("d_stop", 1e-8);
    c.stopping.T_win = s.number("T_win", 1.0);
    c.stopping.stop_on_convergence = s.boolean("stop_on_convergence", true);
    require(c.stopping.D_stop > 0.0, "stopping.D_stop", "must be > 0");
    require(c.stopping.d_stop > 0.0, "stopping.d_stop", "must be > 0");
    require(c.stopping.T_win > 0.0, "stopping.T_win", "must be > 0");
    s.finish();
  }

  {
    Section s(root.child("stationary"), "stationary");
    try {
      c.stationary.method = stationary_method_from_string(s.text("method", "gradient_flow"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("stationary.method", e.what());
    }
    c.stationary.tol = s.number("tol", 1e-9);
    c.stationary.max_iter = static_cast<int>(s.integer("max_iter", 50));
    c.stationary.zero_tol = s.number("zero_tol", 0.0);
    c.stationary.eigen_count = static_cast<int>(s.integer("eigen_count", 8));
    c.stationary.check_large_L = s.boolean("check_large_L", true);
    require(c.stationary.tol > 0.0, "stationary.tol", "must be > 0");
    require(c.stationary.max_iter >= 1, "stationary.max_iter", "must be >= 1");
    require(c.stationary.zero_tol >= 0.0, "stationary.zero_tol", "must be >= 0");
    require(c.stationary.eigen_count >= 1 && c.stationary.eigen_count <= 64,
            "stationary.eigen_count", "must be in [1, 64]");
    s.finish();
  }

  {
    Section s(root.child("small_energy"), "small_energy");
    c.small_energy.kappa = s.optional_number("kappa");
    c.small_energy.sigma = s.optional_number("sigma");
    c.small_energy.epsilon = s.number("epsilon", 1e-2);
    require(!c.small_energy.kappa || *c.small_energy.kappa > 0.0, "small_energy.kappa",
            "must be > 0");
    require(!c.small_energy.sigma || *c.small_energy.sigma >= 1.0, "small_energy.sigma",
            "must be >= 1");
    require(c.small_energy.epsilon > 0.0, "small_energy.epsilon", "must be > 0");
    s.finish();
  }

  root.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["grid"] = {{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"bc_mode", to_string(c.grid.bc)}};
  j["params"] = {{"nu", c.params.nu},
                 {"L", c.params.L},
                 {"delta", c.params.delta},
                 {"potential",
                  {{"family", to_string(c.params.potential.family)},
                   {"a", c.params.potential.a},
                   {"c_psi", c.params.potential.c_psi}}}};
  nlohmann::ordered_json scheme = {{"dt", c.scheme.dt},
                                   {"dt_max", c.scheme.dt_max},
                                   {"t_end", c.scheme.t_end},
                                   {"cfl_safety", c.scheme.cfl_safety}};
  if (c.scheme.budget_tol) {
    scheme["budget_tol"] = *c.scheme.budget_tol;
  } else {
    scheme["budget_tol"] = "calibrated";
  }
  scheme["calibration_steps"] = c.scheme.calibration_steps;
  scheme["budget_factor"] = c.scheme.budget_factor;
  scheme["budget_floor"] = c.scheme.budget_floor;
  scheme["director_only"] = c.scheme.director_only;
  j["scheme"] = scheme;
  j["init"] = {{"kind", to_string(c.init.kind)},
               {"seed", c.init.seed},
               {"amplitude", c.init.amplitude},
               {"k_max", c.init.k_max},
               {"angle", c.init.angle},
               {"velocity_energy", c.init.velocity_energy},
               {"clamp", c.init.clamp},
               {"core", c.init.core}};
  j["output"] = {{"cadence", c.output.cadence},
                 {"snapshot_every", c.output.snapshot_every},
                 {"out_dir", c.output.out_dir}};
  j["stopping"] = {{"D_stop", c.stopping.D_stop},
                   {"d_stop", c.stopping.d_stop},
                   {"T_win", c.stopping.T_win},
                   {"stop_on_convergence", c.stopping.stop_on_convergence}};
  j["stationary"] = {{"method", to_string(c.stationary.method)},
                     {"tol", c.stationary.tol},
                     {"max_iter", c.stationary.max_iter},
                     {"zero_tol", c.stationary.zero_tol},
                     {"eigen_count", c.stationary.eigen_count},
                     {"check_large_L", c.stationary.check_large_L}};
  nlohmann::ordered_json se;
  se["kappa"] = c.small_energy.kappa ? nlohmann::ordered_json(*c.small_energy.kappa) : nullptr;
  se["sigma"] = c.small_energy.sigma ? nlohmann::ordered_json(*c.small_energy.sigma) : nullptr;
  se["epsilon"] = c.small_energy.epsilon;
  j["small_energy"] = se;
  return j;
}

}  // namespace nematic
