#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nematic/grid.hpp"
#include "nematic/operators.hpp"
#include "nematic/potential.hpp"

namespace nematic {

/// Coefficients of the coupled system: viscosity nu, elastic constant L and
/// the stretching switch delta.
struct ModelParams {
  double nu = 1.0;
  double L = 1.0;
  double delta = 0.0;
  PotentialSpec potential;

  /// Throws std::invalid_argument on nu <= 0, L <= 0, delta < 0, or
  /// delta > 0 outside periodic mode.
  void validate(BcMode bc) const;
};

struct State {
  double t = 0.0;
  VectorField u;  // divergence free
  VectorField d;
  ScalarField p;  // diagnostic, defined up to a constant
};

struct EnergyBreakdown {
  double kinetic = 0.0;
  double elastic = 0.0;
  double bulk = 0.0;
  double total = 0.0;
};

/// One row of the trajectory log. A row summarises the `steps` steps taken
/// since the previous row: `budget_defect` and `signed_defect` are summed
/// over them and `max_abs_d` is the sup over them; every other quantity is
/// evaluated on the state at time `t`.
struct StepReport {
  double t = 0.0;
  double dt = 0.0;
  long step = 0;
  int steps = 0;
  double total_energy = 0.0;
  double kinetic = 0.0;
  double elastic = 0.0;
  double bulk = 0.0;
  double dissipation = 0.0;
  double budget_defect = 0.0;  // sum of |EE(t+) - EE(t) + dt D(t+)|
  double signed_defect = 0.0;  // sum of EE(t+) - EE(t) + dt D(t+)
  double max_abs_d = 0.0;
  double grad_u_norm = 0.0;
  double residual_norm = 0.0;  // ||-L Lap d + f(d)||
};

class CflError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepOptions {
  /// Integrate the director alone with u = 0 (the gradient flow of the
  /// configuration energy).
  bool freeze_velocity = false;
  double solver_tol = 1e-13;
  int solver_max_iter = 200;
};

/// Semi-implicit first-order scheme for (u, d):
///
///   (d+ - d)/dt + u.grad d+ - delta d.grad u = L Lap d+ - f(d)
///   (u* - u)/dt + conv(u) = nu Lap u* + (grad d+)^T mu+ + delta div(mu+ (x) d+)
///   u+ = P u*,   p = phi / dt
///
/// with mu = -L Lap d + f(d). The director solve is linear in d+ and done
/// with BiCGSTAB preconditioned by (I - dt L Lap)^-1. The force
/// (grad d)^T mu differs from div(-L grad d . grad d) by a gradient that the
/// projection removes, and pairs exactly with the transport term in the
/// energy balance.
class Model {
 public:
  Model(const Grid& grid, ModelParams params, StepOptions options = {});

  const Grid& grid() const { return ops_.grid(); }
  const FieldOps& ops() const { return ops_; }
  const Potential& potential() const { return potential_; }
  const ModelParams& params() const { return params_; }
  const StepOptions& options() const { return options_; }

  /// Pointwise f(d), no dealiasing.
  VectorField bulk_force(const VectorField& d) const;
  /// -L Lap d + f(d).
  VectorField chemical_potential(const VectorField& d) const;

  EnergyBreakdown total_energy(const State& s) const;
  /// ||mu||^2 + nu <-Lap u, u>.
  double dissipation(const State& s) const;
  StepReport report(const State& s) const;

  /// Largest dt allowed by advective CFL <= 0.5 and dt * reaction <= 0.5.
  double max_stable_dt(const State& s) const;

  struct StepResult {
    State state;
    StepReport report;
  };
  /// Throws CflError if dt exceeds max_stable_dt and BlowUpError on
  /// non-finite output.
  StepResult step(const State& s, double dt) const;

  State make_state(VectorField d, VectorField u, double t = 0.0) const;

 private:
  ModelParams params_;
  StepOptions options_;
  FieldOps ops_;
  Potential potential_;
};

// --- runs ----------------------------------------------------------------

struct RunSchedule {
  double dt = 0.0;  // <= 0: cfl_safety * max_stable_dt(s0)
  double dt_max = 0.02;
  double t_end = 10.0;
  double cfl_safety = 0.5;
  int cadence = 1;          // log a report every `cadence` steps
  int snapshot_every = 0;   // keep/emit a frame every n steps, 0 = first and last only
  double D_stop = 1e-10;
  double d_stop = 1e-8;
  double T_win = 1.0;
  bool stop_on_convergence = true;
  std::optional<double> budget_tol;  // empty: calibrated
  int calibration_steps = 20;
  double budget_factor = 10.0;
  double budget_floor = 1e-14;
  bool keep_frames = true;
  std::function<void(const State&, int frame)> on_frame;
};

struct Frame {
  double t = 0.0;
  VectorField d;
};

enum class RunOutcome { converged, reached_t_end, blow_up };
std::string to_string(RunOutcome outcome);

struct RunInfo {
  double dt = 0.0;
  double budget_constant = 0.0;  // C in budget_tol = factor * C * dt^2
  double budget_tol = 0.0;
  double delta = 0.0;
  double d0_max = 0.0;
  bool director_only = false;
  double D_stop = 0.0;
  double d_stop = 0.0;
  double T_win = 0.0;
  long steps = 0;
  double final_window_change = -1.0;  // ||d(t) - d(t - T_win)||, -1 if unavailable
  RunOutcome outcome = RunOutcome::reached_t_end;
  std::string message;
};

struct TrajectoryLog {
  std::vector<StepReport> reports;
  std::vector<Frame> frames;
  RunInfo info;

  bool converged() const { return info.outcome == RunOutcome::converged; }
};

struct RunResult {
  TrajectoryLog log;
  State final_state;  // last valid state
};

/// C = max |signed defect| / dt^2 over a short calibration run from s0.
double calibrate_budget_constant(const Model& model, const State& s0, double dt, int steps);

/// Integrates until t_end or until D <= D_stop and the director moved less
/// than d_stop over the trailing window T_win. CFL rejections halve dt;
/// blow-up ends the run with the partial log and the last valid state.
RunResult run(const Model& model, const State& s0, const RunSchedule& schedule);

}  // namespace nematic
