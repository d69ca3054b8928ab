#include "nematic/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nematic {

namespace {

constexpr double kValidationTol = 1e-10;
constexpr int kSamplesPerUnit = 4096;

// 3-point Gauss-Legendre on [a, b].
template <class F>
double gauss3(const F& fn, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double off = half * std::sqrt(0.6);
  return half * (5.0 * fn(mid - off) + 8.0 * fn(mid) + 5.0 * fn(mid + off)) / 9.0;
}

}  // namespace

std::string to_string(PotentialFamily family) {
  switch (family) {
    case PotentialFamily::ginzburg_landau: return "ginzburg_landau";
    case PotentialFamily::capped_gl: return "capped_gl";
    case PotentialFamily::exp_saturating: return "exp_saturating";
  }
  return "unknown";
}

PotentialFamily potential_family_from_string(const std::string& name) {
  if (name == "ginzburg_landau") return PotentialFamily::ginzburg_landau;
  if (name == "capped_gl") return PotentialFamily::capped_gl;
  if (name == "exp_saturating") return PotentialFamily::exp_saturating;
  throw std::invalid_argument("unknown potential family '" + name + "'");
}

Potential::Potential(const PotentialSpec& spec) : name_(to_string(spec.family)), spec_(spec) {
  switch (spec.family) {
    case PotentialFamily::ginzburg_landau:
      psi_ = [](double r) { return r; };
      dpsi_ = [](double) { return 1.0; };
      psi_hat_ = [](double r) { return 0.5 * (r * r + 1.0); };
      c_psi_ = 1.0;
      break;
    case PotentialFamily::capped_gl:
      psi_ = [](double r) { return r <= 1.0 ? r : 1.0 + std::tanh(r - 1.0); };
      dpsi_ = [](double r) {
        if (r <= 1.0) return 1.0;
        const double c = std::cosh(r - 1.0);
        return 1.0 / (c * c);
      };
      psi_hat_ = [](double r) {
        if (r <= 1.0) return 0.5 * (r * r + 1.0);
        return r + std::log(std::cosh(r - 1.0));
      };
      c_psi_ = 1.0;
      break;
    case PotentialFamily::exp_saturating: {
      const double a = spec.a;
      if (!(a > 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("exp_saturating requires a > 0");
      }
      // 1 - e^{-a}, kept in expm1 form for small a.
      const double norm = -std::expm1(-a);
      psi_ = [a, norm](double r) { return -std::expm1(-a * r) / norm; };
      dpsi_ = [a, norm](double r) { return a * std::exp(-a * r) / norm; };
      psi_hat_ = [a, norm](double r) {
        return 1.0 + ((r - 1.0) + (std::exp(-a * r) - std::exp(-a)) / a) / norm;
      };
      c_psi_ = a / norm;
      break;
    }
  }
  if (spec.c_psi > 0.0) c_psi_ = spec.c_psi;
  spec_.c_psi = c_psi_;
}

Potential::Potential(std::string name, ScalarFn psi, ScalarFn dpsi, ScalarFn psi_hat,
                     double c_psi)
    : name_(std::move(name)),
      psi_(std::move(psi)),
      dpsi_(std::move(dpsi)),
      psi_hat_(std::move(psi_hat)),
      c_psi_(c_psi) {
  spec_.c_psi = c_psi;
}

Vec2 Potential::f(const Vec2& d) const {
  const double s = psi_(d[0] * d[0] + d[1] * d[1]) - 1.0;
  return {s * d[0], s * d[1]};
}

double Potential::bulk_density(const Vec2& d) const {
  const double r = d[0] * d[0] + d[1] * d[1];
  return 0.5 * (psi_hat_(r) - r);
}

double Potential::xi(const Vec2& d) const {
  return 0.5 * psi_hat_(d[0] * d[0] + d[1] * d[1]);
}

Mat2 Potential::xi_hessian(const Vec2& d) const {
  const double r = d[0] * d[0] + d[1] * d[1];
  const double p = psi_(r);
  const double q = 2.0 * dpsi_(r);
  const double off = q * d[0] * d[1];
  return {p + q * d[0] * d[0], off, off, p + q * d[1] * d[1]};
}

Mat2 Potential::f_jacobian(const Vec2& d) const {
  Mat2 h = xi_hessian(d);
  h[0] -= 1.0;
  h[3] -= 1.0;
  return h;
}

double Potential::max_reaction(double r_max) const {
  const int n = std::max(64, static_cast<int>(std::ceil(r_max * 256)));
  double worst = 1.0;
  for (int k = 0; k <= n; ++k) {
    const double r = r_max * k / n;
    const double p = psi_(r) - 1.0;
    worst = std::max({worst, std::abs(p), std::abs(p + 2.0 * r * dpsi_(r))});
  }
  return worst;
}

std::array<double, 2> Potential::lower_bound_pair() const {
  switch (spec_.family) {
    case PotentialFamily::ginzburg_landau:
    case PotentialFamily::capped_gl:
      // psi_hat(r) - r = (r - 1)^2 / 2 on [0, 1].
      return {0.5, 2.0};
    case PotentialFamily::exp_saturating: {
      // (psi_hat - id)'' = psi' >= psi'(1) on [0, 1].
      return {0.5 * dpsi_(1.0), 2.0};
    }
  }
  return {0.0, 2.0};
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::string ValidationReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.pass) return c.name;
  }
  return {};
}

ValidationReport validate(const Potential& pot, double r_max) {
  if (!(r_max >= 2.0)) throw std::invalid_argument("validate: R_max must be >= 2");

  ValidationReport report;
  report.potential = pot.name();
  report.r_max = r_max;
  auto add = [&](std::string name, double violation) {
    if (!std::isfinite(violation)) violation = INFINITY;
    report.checks.push_back({std::move(name), violation <= kValidationTol, violation});
  };

  add("psi(0)=0", std::abs(pot.psi(0.0)));
  add("psi(1)=1", std::abs(pot.psi(1.0) - 1.0));
  {
    const double d1 = pot.dpsi(1.0);
    HypothesisCheck c{"psi'(1)>0", d1 > 0.0, d1 > 0.0 ? 0.0 : -d1};
    report.checks.push_back(c);
  }
  add("psi_hat(1)=1", std::abs(pot.psi_hat(1.0) - 1.0));

  // Nodes are k / 4096, so r = 1 is always a node and no quadrature interval
  // straddles it.
  const long n = static_cast<long>(std::ceil(r_max * kSamplesPerUnit));
  const double h = r_max / static_cast<double>(n);
  double monotone = 0.0, dpsi_range = 0.0, dpsi_consistent = 0.0, antideriv = 0.0,
         sign = 0.0;
  const double c_psi = pot.c_psi();
  auto psi_fn = [&](double r) { return pot.psi(r); };
  auto dpsi_fn = [&](double r) { return pot.dpsi(r); };
  for (long k = 0; k <= n; ++k) {
    const double r = h * static_cast<double>(k);
    const double p = pot.psi(r);
    const double dp = pot.dpsi(r);
    dpsi_range = std::max({dpsi_range, -dp, dp - c_psi});
    if (r >= 1.0) sign = std::max(sign, -(p - 1.0) * r);
    if (k == n) break;
    const double r1 = h * static_cast<double>(k + 1);
    monotone = std::max(monotone, p - pot.psi(r1));
    dpsi_consistent =
        std::max(dpsi_consistent, std::abs(pot.psi(r1) - p - gauss3(dpsi_fn, r, r1)) / h);
    antideriv = std::max(
        antideriv, std::abs(pot.psi_hat(r1) - pot.psi_hat(r) - gauss3(psi_fn, r, r1)) / h);
  }
  add("psi nondecreasing", monotone);
  add("0<=psi'<=c_psi", dpsi_range);
  add("psi' matches psi", dpsi_consistent);
  add("psi_hat'=psi", antideriv);
  add("(psi(r)-1)r>=0 for r>=1", sign);
  return report;
}

ValidationReport validate(const PotentialSpec& spec, double r_max) {
  return validate(Potential(spec), r_max);
}

void require_valid(const Potential& potential, double r_max) {
  const auto report = validate(potential, r_max);
  if (!report.ok()) {
    const auto name = report.first_failure();
    double worst = 0.0;
    for (const auto& c : report.checks) {
      if (c.name == name) worst = c.worst_violation;
    }
    throw std::invalid_argument("potential '" + potential.name() + "' violates hypothesis " +
                                name + " (worst violation " + std::to_string(worst) + ")");
  }
}

}  // namespace nematic
