#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nematic/dynamics.hpp"
#include "nematic/stationary.hpp"

namespace nematic {

enum class TheoremId {
  energy_inequality,
  max_principle,
  omega_limit,
  single_point,
  decay_rate,
  dissipation_bound,
  large_L,
  small_energy
};
std::string to_string(TheoremId id);

enum class VerdictStatus { pass, fail, not_applicable, inconclusive };
std::string to_string(VerdictStatus s);

struct TheoremVerdict {
  TheoremId id = TheoremId::energy_inequality;
  VerdictStatus status = VerdictStatus::fail;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::pair<std::string, std::string>> labels;
  std::string notes;

  bool pass() const { return status == VerdictStatus::pass; }
  double metric(const std::string& key) const;
  std::string label(const std::string& key) const;
};

struct DiagnosticTolerances {
  double max_principle = 1e-8;
  double omega_grad_u = 1e-6;
  double omega_residual = 1e-6;
  double decay_decades = 3.0;
  double decay_floor_factor = 20.0;  // fit points need distance >= factor * final window change
  double rate_factor = 2.0;
  double single_point_factor = 10.0;
};

/// Pass iff every report has max_abs_d <= 1 + tol. Not applicable for
/// delta > 0 or max |d0| > 1.
TheoremVerdict max_principle_check(const TrajectoryLog& log, const DiagnosticTolerances& tol = {});

/// Pass iff EE never rises by more than budget_tol per step between
/// consecutive reports.
TheoremVerdict energy_monotonicity_check(const TrajectoryLog& log);

/// Pass iff ||grad u|| and the stationary residual of the final state are
/// both small. Inconclusive when the run did not converge.
TheoremVerdict omega_limit_check(const TrajectoryLog& log, const State& final_state,
                                 const Model& model, const DiagnosticTolerances& tol = {});

/// The director path over the trailing half has finite length comparable to
/// the remaining distance, i.e. the trajectory settles on one point.
TheoremVerdict single_point_check(const TrajectoryLog& log, const DiagnosticTolerances& tol = {});

struct DecayFit {
  bool conclusive = false;
  std::string model;  // "exponential" or "algebraic"
  // exponential: log e = log_a - mu t
  double mu = 0.0, mu_ci = 0.0, exp_log_amplitude = 0.0, exp_rss = 0.0;
  // algebraic: log e = log_c - s log(1 + t), theta = s / (1 + 2 s)
  double s = 0.0, s_ci = 0.0, alg_log_amplitude = 0.0, alg_rss = 0.0, theta = 0.0;
  double decades = 0.0;
  int points = 0;
  double t_first = 0.0, t_last = 0.0;
  double floor = 0.0;

  double exponential_at(double t) const;
  double algebraic_at(double t) const;
};

/// Least squares of log e against t and against log(1 + t) over the tail:
/// samples with e >= floor after e first falls below min(peak / 10, 1e4 * smallest such sample).
/// Inconclusive below `decades` decades of data.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& e, double floor,
                   double decades = 3.0);

/// ||d(t) - d_inf|| at every frame.
std::vector<double> distances_to(const TrajectoryLog& log, const VectorField& d_inf);

/// Smallest nonzero eigenvalue of the linearization at a constant unit
/// director: min(2 psi'(1), L lambda_1) with lambda_1 the first nonzero
/// eigenvalue of -Lap (4 pi^2 on the torus).
double predicted_rate(const Model& model);

TheoremVerdict decay_fit(const TrajectoryLog& log, const VectorField& d_inf, const Model& model,
                         const DiagnosticTolerances& tol = {}, DecayFit* fit_out = nullptr);

/// C* = max over increasing segments of (dD/dt) / (D^3 + 1); pass iff D is
/// finite on the trailing half and D(t_end) <= D_stop.
TheoremVerdict dissipation_bound_check(const TrajectoryLog& log);

TheoremVerdict verdict_from_criterion(TheoremId id, const CriterionReport& report);

std::string verdicts_json(const std::vector<TheoremVerdict>& verdicts);
std::string verdicts_table(const std::vector<TheoremVerdict>& verdicts);

/// Plot-ready CSV: t, EE, D, distance to d_inf and both fitted curves. The
/// last three columns are empty on rows without a frame.
std::string plot_csv(const TrajectoryLog& log, const std::vector<double>& distances,
                     const DecayFit& fit);

}  // namespace nematic
