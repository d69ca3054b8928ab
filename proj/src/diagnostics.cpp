#include "nematic/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace nematic {

std::string to_string(TheoremId id) {
  switch (id) {
    case TheoremId::energy_inequality: return "energy_inequality";
    case TheoremId::max_principle: return "max_principle";
    case TheoremId::omega_limit: return "omega_limit";
    case TheoremId::single_point: return "single_point";
    case TheoremId::decay_rate: return "decay_rate";
    case TheoremId::dissipation_bound: return "dissipation_bound";
    case TheoremId::large_L: return "large_L";
    case TheoremId::small_energy: return "small_energy";
  }
  return "unknown";
}

std::string to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::pass: return "pass";
    case VerdictStatus::fail: return "fail";
    case VerdictStatus::not_applicable: return "not_applicable";
    case VerdictStatus::inconclusive: return "inconclusive";
  }
  return "unknown";
}

double TheoremVerdict::metric(const std::string& key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) return v;
  }
  throw std::out_of_range("verdict " + to_string(id) + " has no metric '" + key + "'");
}

std::string TheoremVerdict::label(const std::string& key) const {
  for (const auto& [k, v] : labels) {
    if (k == key) return v;
  }
  throw std::out_of_range("verdict " + to_string(id) + " has no label '" + key + "'");
}

namespace {

VerdictStatus status_of(bool pass) { return pass ? VerdictStatus::pass : VerdictStatus::fail; }

// Least squares y = a + b x with the standard error of b.
struct LineFit {
  double a = 0.0, b = 0.0, se_b = 0.0, rss = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.b = sxx > 0.0 ? sxy / sxx : 0.0;
  f.a = my - f.b * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.a - f.b * x[i];
    f.rss += r * r;
  }
  f.se_b = (x.size() > 2 && sxx > 0.0) ? std::sqrt(f.rss / (n - 2.0) / sxx) : INFINITY;
  return f;
}

}  // namespace

TheoremVerdict max_principle_check(const TrajectoryLog& log, const DiagnosticTolerances& tol) {
  TheoremVerdict v;
  v.id = TheoremId::max_principle;
  double max_d = 0.0;
  for (const auto& r : log.reports) max_d = std::max(max_d, r.max_abs_d);
  v.metrics = {{"max_abs_d", max_d},
               {"excess_over_one", max_d - 1.0},
               {"d0_max", log.info.d0_max},
               {"delta", log.info.delta},
               {"tolerance", tol.max_principle}};
  if (log.info.delta > 0.0) {
    v.status = VerdictStatus::not_applicable;
    v.notes = "delta > 0: no maximum principle is expected";
  } else if (log.info.d0_max > 1.0 + 1e-12) {
    v.status = VerdictStatus::not_applicable;
    v.notes = "initial director exceeds the unit ball";
  } else {
    v.status = status_of(max_d <= 1.0 + tol.max_principle);
    v.notes = "sup over the log of max |d| against 1 + tolerance";
  }
  return v;
}

TheoremVerdict energy_monotonicity_check(const TrajectoryLog& log) {
  TheoremVerdict v;
  v.id = TheoremId::energy_inequality;
  double worst = 0.0, worst_excess = -INFINITY, total_defect = 0.0, max_signed = -INFINITY;
  int violations = 0;
  for (std::size_t k = 1; k < log.reports.size(); ++k) {
    const auto& r = log.reports[k];
    const double up = r.total_energy - log.reports[k - 1].total_energy;
    const double allowed = log.info.budget_tol * std::max(1, r.steps);
    worst = std::max(worst, up);
    worst_excess = std::max(worst_excess, up - allowed);
    if (up > allowed) ++violations;
    total_defect += r.budget_defect;
    max_signed = std::max(max_signed, r.signed_defect);
  }
  const bool finite = std::all_of(log.reports.begin(), log.reports.end(),
                                  [](const StepReport& r) { return std::isfinite(r.total_energy); });
  v.status = status_of(violations == 0 && finite);
  v.metrics = {{"worst_uphill", worst},
               {"uphill_violations", static_cast<double>(violations)},
               {"total_budget_defect", total_defect},
               {"budget_tol", log.info.budget_tol},
               {"budget_constant", log.info.budget_constant},
               {"dt", log.info.dt},
               {"initial_energy", log.reports.empty() ? 0.0 : log.reports.front().total_energy},
               {"final_energy", log.reports.empty() ? 0.0 : log.reports.back().total_energy}};
  if (!std::isfinite(worst_excess)) worst_excess = 0.0;
  v.metrics.push_back({"worst_excess_over_budget", worst_excess});
  v.notes = "EE(t+) - EE(t) against budget_tol per step between reports";
  return v;
}

TheoremVerdict omega_limit_check(const TrajectoryLog& log, const State& final_state,
                                 const Model& model, const DiagnosticTolerances& tol) {
  TheoremVerdict v;
  v.id = TheoremId::omega_limit;
  const double grad_u =
      std::sqrt(std::max(0.0, -inner(model.ops().laplacian(final_state.u), final_state.u)));
  const double residual = norm(stationary_residual(model, final_state.d));
  const Classification c = classify(final_state.d);
  v.metrics = {{"grad_u_norm", grad_u},
               {"stationary_residual", residual},
               {"t_end", final_state.t},
               {"final_window_change", log.info.final_window_change}};
  v.labels = {{"classification", to_string(c)}, {"outcome", to_string(log.info.outcome)}};
  v.notes =
      "norms are equivalent on the grid, so weak and strong convergence cannot be told apart";
  if (!log.converged()) {
    v.status = VerdictStatus::inconclusive;
    v.notes = "run ended without meeting the convergence criterion; " + v.notes;
    return v;
  }
  v.status = status_of(grad_u <= tol.omega_grad_u && residual <= tol.omega_residual);
  return v;
}

TheoremVerdict single_point_check(const TrajectoryLog& log, const DiagnosticTolerances& tol) {
  TheoremVerdict v;
  v.id = TheoremId::single_point;
  if (log.frames.size() < 3) {
    v.status = VerdictStatus::inconclusive;
    v.metrics = {{"frames", static_cast<double>(log.frames.size())}};
    v.notes = "too few frames";
    return v;
  }
  const double t0 = log.frames.front().t, t1 = log.frames.back().t;
  const double t_half = t0 + 0.5 * (t1 - t0);
  std::size_t first = 0;
  while (first + 1 < log.frames.size() && log.frames[first].t < t_half) ++first;
  double length = 0.0;
  for (std::size_t k = first + 1; k < log.frames.size(); ++k) {
    length += norm(log.frames[k].d - log.frames[k - 1].d);
  }
  const double remaining = norm(log.frames[first].d - log.frames.back().d);
  v.metrics = {{"trailing_path_length", length},
               {"trailing_start_distance", remaining},
               {"final_window_change", log.info.final_window_change},
               {"frames", static_cast<double>(log.frames.size())}};
  if (!log.converged()) {
    v.status = VerdictStatus::inconclusive;
    v.notes = "run did not converge";
    return v;
  }
  v.status = status_of(length <= tol.single_point_factor * remaining + log.info.d_stop);
  v.notes = "path length of the trailing half against the distance it covers";
  return v;
}

double DecayFit::exponential_at(double t) const { return std::exp(exp_log_amplitude - mu * t); }
double DecayFit::algebraic_at(double t) const {
  return std::exp(alg_log_amplitude - s * std::log1p(t));
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& e, double floor,
                   double decades) {
  DecayFit f;
  f.floor = floor;
  std::vector<double> ts, ls, lt;
  double emax = 0.0, emin = INFINITY;
  const std::size_t n = std::min(t.size(), e.size());
  // tail: the last four decades above the floor, and never the first decade below the peak
  double peak = 0.0, low = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(e[i])) continue;
    peak = std::max(peak, e[i]);
    if (e[i] >= floor && e[i] > 0.0) low = std::min(low, e[i]);
  }
  const double top = std::min(0.1 * peak, 1e4 * low);
  std::size_t start = 0;
  while (start < n && !(std::isfinite(e[start]) && e[start] <= top)) ++start;
  for (std::size_t i = start; i < n; ++i) {
    if (!(e[i] >= floor) || !(e[i] > 0.0) || !std::isfinite(e[i])) continue;
    ts.push_back(t[i]);
    ls.push_back(std::log(e[i]));
    lt.push_back(std::log1p(t[i]));
    emax = std::max(emax, e[i]);
    emin = std::min(emin, e[i]);
  }
  f.points = static_cast<int>(ts.size());
  if (ts.size() < 3) return f;
  f.t_first = ts.front();
  f.t_last = ts.back();
  f.decades = std::log10(emax / emin);
  const LineFit ex = fit_line(ts, ls);
  f.mu = -ex.b;
  f.mu_ci = 1.96 * ex.se_b;
  f.exp_log_amplitude = ex.a;
  f.exp_rss = ex.rss;
  const LineFit al = fit_line(lt, ls);
  f.s = -al.b;
  f.s_ci = 1.96 * al.se_b;
  f.alg_log_amplitude = al.a;
  f.alg_rss = al.rss;
  f.theta = f.s / (1.0 + 2.0 * f.s);
  f.model = f.exp_rss <= f.alg_rss ? "exponential" : "algebraic";
  f.conclusive = f.decades >= decades;
  return f;
}

std::vector<double> distances_to(const TrajectoryLog& log, const VectorField& d_inf) {
  std::vector<double> out;
  out.reserve(log.frames.size());
  for (const auto& fr : log.frames) out.push_back(norm(fr.d - d_inf));
  return out;
}

double predicted_rate(const Model& model) {
  return std::min(2.0 * model.potential().dpsi(1.0),
                  model.params().L * model.ops().laplacian_min_nonzero_eigenvalue());
}

TheoremVerdict decay_fit(const TrajectoryLog& log, const VectorField& d_inf, const Model& model,
                         const DiagnosticTolerances& tol, DecayFit* fit_out) {
  TheoremVerdict v;
  v.id = TheoremId::decay_rate;
  std::vector<double> t;
  for (const auto& fr : log.frames) t.push_back(fr.t);
  const std::vector<double> e = distances_to(log, d_inf);
  const double wc = log.info.final_window_change > 0.0 ? log.info.final_window_change : 0.0;
  const double floor = tol.decay_floor_factor * std::max(wc, 1e-12);
  const DecayFit f = fit_decay(t, e, floor, tol.decay_decades);
  if (fit_out) *fit_out = f;
  const Classification c = classify(d_inf);
  const double predicted = predicted_rate(model);
  v.metrics = {{"mu", f.mu},
               {"mu_ci95", f.mu_ci},
               {"exp_rss", f.exp_rss},
               {"s", f.s},
               {"s_ci95", f.s_ci},
               {"theta", f.theta},
               {"alg_rss", f.alg_rss},
               {"decades", f.decades},
               {"points", static_cast<double>(f.points)},
               {"floor", f.floor},
               {"predicted_rate", predicted}};
  v.labels = {{"model", f.model.empty() ? "none" : f.model}, {"limit", to_string(c)}};
  if (f.points == 0) {
    // already at the limit: no tail to fit
    v.status = VerdictStatus::not_applicable;
    v.notes = "distance to the limit never exceeds the noise floor";
    return v;
  }
  if (!f.conclusive) {
    v.status = VerdictStatus::inconclusive;
    v.notes = "tail spans fewer than the required decades above the noise floor";
    return v;
  }
  if (c == Classification::constant_unit) {
    const bool in_band = f.mu >= predicted / tol.rate_factor && f.mu <= predicted * tol.rate_factor;
    v.status = status_of(f.model == "exponential" && in_band);
    v.notes = "constant unit limit: exponential decay at the smallest nonzero linearized "
              "eigenvalue expected within the rate factor";
  } else {
    v.status = status_of(f.model == "exponential" ? f.mu > 0.0 : f.s > 0.0);
    v.notes = "non-constant or zero limit: decay recorded, rate not predicted";
  }
  return v;
}

TheoremVerdict dissipation_bound_check(const TrajectoryLog& log) {
  TheoremVerdict v;
  v.id = TheoremId::dissipation_bound;
  const auto& r = log.reports;
  if (r.empty()) {
    v.status = VerdictStatus::inconclusive;
    v.metrics = {{"reports", 0.0}};
    v.notes = "empty log";
    return v;
  }
  double c_star = 0.0;
  for (std::size_t k = 1; k < r.size(); ++k) {
    const double dD = r[k].dissipation - r[k - 1].dissipation;
    const double dt = r[k].t - r[k - 1].t;
    if (dD > 0.0 && dt > 0.0) {
      const double D = std::max(r[k].dissipation, r[k - 1].dissipation);
      c_star = std::max(c_star, (dD / dt) / (D * D * D + 1.0));
    }
  }
  const double t0 = r.front().t, t1 = r.back().t;
  double sup_half = 0.0, quarter_worst = -INFINITY;
  bool finite = true;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r[k].t >= t0 + 0.5 * (t1 - t0)) {
      sup_half = std::max(sup_half, r[k].dissipation);
      finite = finite && std::isfinite(r[k].dissipation);
    }
    if (k > 0 && r[k - 1].t >= t0 + 0.75 * (t1 - t0)) {
      const double allowed = log.info.budget_tol * std::max(1, r[k].steps);
      quarter_worst = std::max(quarter_worst, r[k].dissipation - r[k - 1].dissipation - allowed);
    }
  }
  if (!std::isfinite(quarter_worst)) quarter_worst = 0.0;
  const double d_end = r.back().dissipation;
  v.status = status_of(finite && d_end <= log.info.D_stop);
  v.metrics = {{"c_star", c_star},
               {"trailing_half_sup_D", sup_half},
               {"D_end", d_end},
               {"D_stop", log.info.D_stop},
               {"trailing_quarter_worst_increase_over_tol", quarter_worst},
               {"trailing_quarter_monotone", quarter_worst <= 0.0 ? 1.0 : 0.0}};
  v.notes = "post-transient window is the trailing half of the log";
  return v;
}

TheoremVerdict verdict_from_criterion(TheoremId id, const CriterionReport& report) {
  TheoremVerdict v;
  v.id = id;
  v.status = status_of(report.pass);
  v.metrics = report.metrics;
  v.notes = report.notes;
  return v;
}

std::string verdicts_json(const std::vector<TheoremVerdict>& verdicts) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& v : verdicts) {
    nlohmann::ordered_json j;
    j["theorem_id"] = to_string(v.id);
    j["status"] = to_string(v.status);
    j["pass"] = v.pass();
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, x] : v.metrics) {
      if (std::isfinite(x)) {
        m[k] = x;
      } else {
        m[k] = nullptr;
      }
    }
    j["metrics"] = m;
    nlohmann::ordered_json l = nlohmann::ordered_json::object();
    for (const auto& [k, x] : v.labels) l[k] = x;
    j["labels"] = l;
    j["notes"] = v.notes;
    arr.push_back(j);
  }
  nlohmann::ordered_json root;
  root["verdicts"] = arr;
  return root.dump(2) + "\n";
}

std::string verdicts_table(const std::vector<TheoremVerdict>& verdicts) {
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-18s %-15s %s\n", "theorem", "status", "metrics");
  out += buf;
  for (const auto& v : verdicts) {
    std::string m;
    for (const auto& [k, x] : v.labels) m += k + "=" + x + " ";
    for (const auto& [k, x] : v.metrics) {
      std::snprintf(buf, sizeof buf, "%s=%.6g ", k.c_str(), x);
      m += buf;
    }
    std::snprintf(buf, sizeof buf, "%-18s %-15s ", to_string(v.id).c_str(),
                  to_string(v.status).c_str());
    out += buf + m + "\n";
  }
  return out;
}

std::string plot_csv(const TrajectoryLog& log, const std::vector<double>& distances,
                     const DecayFit& fit) {
  std::string out = "t,total_energy,dissipation,distance_to_limit,fit_exponential,fit_algebraic\n";
  char buf[256];
  std::size_t f = 0;
  const bool fitted = fit.points >= 3;
  for (const auto& r : log.reports) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", r.t, r.total_energy, r.dissipation);
    out += buf;
    while (f < log.frames.size() && log.frames[f].t < r.t - 1e-12 * std::max(1.0, r.t)) ++f;
    if (f < log.frames.size() && std::abs(log.frames[f].t - r.t) <= 1e-12 * std::max(1.0, r.t) &&
        f < distances.size()) {
      std::snprintf(buf, sizeof buf, ",%.17g", distances[f]);
      out += buf;
      if (fitted) {
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", fit.exponential_at(r.t),
                      fit.algebraic_at(r.t));
        out += buf;
      } else {
        out += ",,";
      }
    } else {
      out += ",,,";
    }
    out += "\n";
  }
  return out;
}

}  // namespace nematic
