#include "nematic/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "krylov.hpp"

namespace nematic {

void ModelParams::validate(BcMode bc) const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("params.nu must be > 0");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("params.L must be > 0");
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("params.delta must be >= 0");
  }
  if (delta > 0.0 && bc != BcMode::periodic) {
    throw std::invalid_argument(
        "params.delta > 0 requires grid.bc_mode = periodic (stretching is not supported with "
        "dirichlet_neumann boundaries)");
  }
}

Model::Model(const Grid& grid, ModelParams params, StepOptions options)
    : params_(params), options_(options), ops_(grid), potential_(params.potential) {
  params_.validate(grid.bc);
}

State Model::make_state(VectorField d, VectorField u, double t) const {
  State s;
  s.t = t;
  d.role = FieldRole::director;
  u.role = FieldRole::velocity;
  s.d = std::move(d);
  s.u = std::move(u);
  s.p = ScalarField(grid());
  return s;
}

VectorField Model::bulk_force(const VectorField& d) const {
  VectorField r = d;
  for (std::size_t k = 0; k < d.size(); ++k) r.set(k, potential_.f(d.at(k)));
  return r;
}

VectorField Model::chemical_potential(const VectorField& d) const {
  VectorField mu = bulk_force(d);
  axpy(-params_.L, ops_.laplacian(d), mu);
  return mu;
}

EnergyBreakdown Model::total_energy(const State& s) const {
  EnergyBreakdown e;
  e.kinetic = 0.5 * inner(s.u, s.u);
  // <-Lap d, d> is the Dirichlet form the scheme dissipates.
  e.elastic = -0.5 * params_.L * inner(ops_.laplacian(s.d), s.d);
  double bulk = 0.0;
  for (std::size_t k = 0; k < s.d.size(); ++k) bulk += potential_.bulk_density(s.d.at(k));
  e.bulk = bulk / static_cast<double>(s.d.size());
  e.total = e.kinetic + e.elastic + e.bulk;
  return e;
}

double Model::dissipation(const State& s) const {
  const VectorField mu = chemical_potential(s.d);
  const double grad_u2 = -inner(ops_.laplacian(s.u), s.u);
  return inner(mu, mu) + params_.nu * grad_u2;
}

StepReport Model::report(const State& s) const {
  StepReport r;
  r.t = s.t;
  const auto e = total_energy(s);
  r.total_energy = e.total;
  r.kinetic = e.kinetic;
  r.elastic = e.elastic;
  r.bulk = e.bulk;
  const VectorField mu = chemical_potential(s.d);
  const double mu2 = inner(mu, mu);
  const double grad_u2 = std::max(0.0, -inner(ops_.laplacian(s.u), s.u));
  r.dissipation = mu2 + params_.nu * grad_u2;
  r.residual_norm = std::sqrt(mu2);
  r.grad_u_norm = std::sqrt(grad_u2);
  r.max_abs_d = max_magnitude(s.d);
  return r;
}

double Model::max_stable_dt(const State& s) const {
  const Grid& g = grid();
  double adv = 0.0;
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    adv = std::max(adv, std::abs(s.u.c[0][k]) / g.hx() + std::abs(s.u.c[1][k]) / g.hy());
  }
  const double dmax = max_magnitude(s.d);
  const double reaction = potential_.max_reaction(std::max(1.0, dmax * dmax));
  double dt = 0.5 / reaction;
  if (adv > 0.0) dt = std::min(dt, 0.5 / adv);
  return dt;
}

Model::StepResult Model::step(const State& s, double dt) const {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const double dt_max = max_stable_dt(s);
  if (dt > dt_max * (1.0 + 1e-12)) {
    throw CflError("step: dt = " + std::to_string(dt) + " exceeds the CFL bound " +
                   std::to_string(dt_max));
  }
  const double L = params_.L;
  const double delta = params_.delta;
  const bool moving = !options_.freeze_velocity && max_abs(s.u.c[0]) + max_abs(s.u.c[1]) > 0.0;

  // Director: (I - dt L Lap + dt u.grad) d+ = d - dt f(d) + dt delta d.grad u.
  VectorField rhs = s.d;
  axpy(-dt, bulk_force(s.d), rhs);
  if (moving && delta > 0.0) axpy(dt * delta, ops_.stretch(s.d, s.u), rhs);
  VectorField d_new = ops_.solve_shifted(rhs, 1.0, dt * L);
  if (moving) {
    auto apply = [&](const VectorField& x) {
      VectorField y = x;
      axpy(-dt * L, ops_.laplacian(x), y);
      axpy(dt, ops_.advect(s.u, x), y);
      return y;
    };
    auto precond = [&](const VectorField& x) { return ops_.solve_shifted(x, 1.0, dt * L); };
    const auto res = detail::bicgstab(apply, precond, rhs, d_new, options_.solver_tol,
                                      options_.solver_max_iter);
    if (!res.converged && !(res.relative_residual < 1e-8)) {
      throw BlowUpError("step: director transport solve failed (relative residual " +
                        std::to_string(res.relative_residual) + ")");
    }
  }
  d_new.role = FieldRole::director;

  State next;
  next.t = s.t + dt;
  next.d = std::move(d_new);

  if (options_.freeze_velocity) {
    next.u = VectorField(grid(), FieldRole::velocity);
    next.p = ScalarField(grid());
  } else {
    const VectorField mu = chemical_potential(next.d);
    VectorField force = ops_.elastic_force(next.d, mu);
    if (delta > 0.0) {
      axpy(delta, ops_.tensor_divergence(ops_.stretch_stress(next.d, mu)), force);
    }
    ops_.dealias(force);
    VectorField rhs_u = s.u;
    axpy(-dt, ops_.convection(s.u), rhs_u);
    axpy(dt, force, rhs_u);
    rhs_u.role = FieldRole::velocity;
    const VectorField u_star = ops_.solve_shifted(rhs_u, 1.0, dt * params_.nu);
    ScalarField phi;
    next.u = ops_.leray_project(u_star, &phi);
    for (double& v : phi.v) v /= dt;
    next.p = std::move(phi);
  }

  if (!all_finite(next.d) || !all_finite(next.u) || !all_finite(next.p)) {
    throw BlowUpError("step: non-finite values at t = " + std::to_string(next.t));
  }

  StepResult out;
  out.report = report(next);
  out.report.dt = dt;
  out.report.steps = 1;
  const double ee_old = total_energy(s).total;
  const double defect = out.report.total_energy - ee_old + dt * out.report.dissipation;
  out.report.signed_defect = defect;
  out.report.budget_defect = std::abs(defect);
  out.state = std::move(next);
  return out;
}

std::string to_string(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::converged: return "converged";
    case RunOutcome::reached_t_end: return "reached_t_end";
    case RunOutcome::blow_up: return "blow_up";
  }
  return "unknown";
}

double calibrate_budget_constant(const Model& model, const State& s0, double dt, int steps) {
  State s = s0;
  double c = 0.0;
  for (int n = 0; n < steps; ++n) {
    auto r = model.step(s, dt);
    c = std::max(c, std::abs(r.report.signed_defect) / (dt * dt));
    s = std::move(r.state);
  }
  return c;
}

RunResult run(const Model& model, const State& s0, const RunSchedule& schedule) {
  RunResult result;
  TrajectoryLog& log = result.log;
  RunInfo& info = log.info;
  info.delta = model.params().delta;
  info.director_only = model.options().freeze_velocity;
  info.d0_max = max_magnitude(s0.d);
  info.D_stop = schedule.D_stop;
  info.d_stop = schedule.d_stop;
  info.T_win = schedule.T_win;

  double dt = schedule.dt;
  if (!(dt > 0.0)) {
    dt = std::min(schedule.dt_max, schedule.cfl_safety * model.max_stable_dt(s0));
  }
  info.dt = dt;

  State s = s0;
  result.final_state = s;

  if (schedule.budget_tol) {
    info.budget_tol = *schedule.budget_tol;
  } else {
    try {
      info.budget_constant =
          calibrate_budget_constant(model, s0, dt, schedule.calibration_steps);
    } catch (const std::runtime_error&) {
      info.budget_constant = 0.0;
    }
    info.budget_tol =
        std::max(schedule.budget_factor * info.budget_constant * dt * dt, schedule.budget_floor);
  }

  StepReport first = model.report(s);
  log.reports.push_back(first);

  int frame_index = 0;
  auto emit_frame = [&](const State& st) {
    if (schedule.keep_frames) log.frames.push_back({st.t, st.d});
    if (schedule.on_frame) schedule.on_frame(st, frame_index);
    ++frame_index;
  };
  emit_frame(s);

  // Director history for the window test, sampled ~64 times per window.
  struct Sample {
    double t;
    VectorField d;
  };
  std::deque<Sample> history;
  const long stride = std::max<long>(1, static_cast<long>(schedule.T_win / (64.0 * dt)));
  history.push_back({s.t, s.d});

  StepReport pending;  // accumulates between logged rows
  pending.steps = 0;
  long step = 0;
  long last_frame_step = 0;
  const double t_eps = 1e-12 * std::max(1.0, schedule.t_end);
  info.outcome = RunOutcome::reached_t_end;

  auto flush = [&](const StepReport& latest) {
    StepReport row = latest;
    row.steps = pending.steps;
    row.budget_defect = pending.budget_defect;
    row.signed_defect = pending.signed_defect;
    row.max_abs_d = pending.max_abs_d;
    row.step = step;
    log.reports.push_back(row);
    pending = StepReport{};
  };

  StepReport latest = first;
  bool criterion_met = false;
  while (s.t < schedule.t_end - t_eps) {
    const double h = std::min(dt, schedule.t_end - s.t);
    Model::StepResult r;
    try {
      r = model.step(s, h);
    } catch (const CflError&) {
      dt *= 0.5;
      if (dt < 1e-12) {
        info.outcome = RunOutcome::blow_up;
        info.message = "time step collapsed below 1e-12";
        break;
      }
      continue;
    } catch (const BlowUpError& e) {
      info.outcome = RunOutcome::blow_up;
      info.message = e.what();
      break;
    }
    ++step;
    s = std::move(r.state);
    latest = r.report;
    pending.steps += 1;
    pending.budget_defect += r.report.budget_defect;
    pending.signed_defect += r.report.signed_defect;
    pending.max_abs_d = std::max(pending.max_abs_d, r.report.max_abs_d);

    if (step % stride == 0) {
      history.push_back({s.t, s.d});
      while (history.size() > 2 && history[1].t <= s.t - schedule.T_win) history.pop_front();
    }

    bool converged = false;
    if (latest.dissipation <= schedule.D_stop && history.front().t <= s.t - schedule.T_win) {
      const double change = norm(s.d - history.front().d);
      info.final_window_change = change;
      converged = change <= schedule.d_stop;
    }
    criterion_met = converged;

    const bool last = converged && schedule.stop_on_convergence;
    const bool at_end = s.t >= schedule.t_end - t_eps;
    if (step % std::max(1, schedule.cadence) == 0 || last || at_end) flush(latest);
    if ((schedule.snapshot_every > 0 && step % schedule.snapshot_every == 0) || last || at_end) {
      emit_frame(s);
      last_frame_step = step;
    }
    if (last) {
      info.outcome = RunOutcome::converged;
      break;
    }
  }

  if (pending.steps > 0) flush(latest);
  if (info.outcome == RunOutcome::reached_t_end && criterion_met) info.outcome = RunOutcome::converged;
  if (info.outcome == RunOutcome::blow_up && last_frame_step != step) emit_frame(s);
  if (info.final_window_change < 0.0 && history.front().t <= s.t - schedule.T_win) {
    info.final_window_change = norm(s.d - history.front().d);
  }
  info.steps = step;
  result.final_state = s;
  return result;
}

}  // namespace nematic
