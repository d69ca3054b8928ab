#include "nematic/init.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace nematic {

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::unit: return "unit";
    case InitKind::zero: return "zero";
    case InitKind::perturbed_unit: return "perturbed_unit";
    case InitKind::random: return "random";
    case InitKind::vortex_pair: return "vortex_pair";
  }
  return "unknown";
}

InitKind init_kind_from_string(const std::string& name) {
  for (InitKind k : {InitKind::unit, InitKind::zero, InitKind::perturbed_unit, InitKind::random,
                     InitKind::vortex_pair}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown init kind '" + name + "'");
}

Samples smooth_random(const Grid& g, FieldRole role, int k_max, SeededRng& rng) {
  constexpr double pi = std::numbers::pi;
  Samples s(g.size(), 0.0);
  if (k_max <= 0) return s;
  const bool periodic = g.bc == BcMode::periodic;
  // Periodic: cos/sin of 2 pi (kx x + ky y) for 0 < |k|_inf <= k_max.
  // Cell-centred: cos(pi kx x) cos(pi ky y) for directors, sin sin for velocity.
  auto add_mode = [&](auto&& basis, double amp) {
    for (int i = 0; i < g.nx; ++i) {
      for (int j = 0; j < g.ny; ++j) s[g.index(i, j)] += amp * basis(g.x(i), g.y(j));
    }
  };
  for (int kx = periodic ? -k_max : 0; kx <= k_max; ++kx) {
    for (int ky = periodic ? -k_max : 0; ky <= k_max; ++ky) {
      if (periodic) {
        if (kx == 0 && ky == 0) continue;
        const double w = 1.0 / (1.0 + kx * kx + ky * ky);
        const double a = rng.normal() * w, b = rng.normal() * w;
        add_mode([&](double x, double y) {
          const double ph = 2.0 * pi * (kx * x + ky * y);
          return a * std::cos(ph) + b * std::sin(ph);
        }, 1.0);
      } else if (role == FieldRole::director) {
        if (kx == 0 && ky == 0) continue;
        const double w = 1.0 / (1.0 + kx * kx + ky * ky);
        add_mode([&](double x, double y) { return std::cos(pi * kx * x) * std::cos(pi * ky * y); },
                 rng.normal() * w);
      } else {
        if (kx == 0 || ky == 0) continue;
        const double w = 1.0 / (1.0 + kx * kx + ky * ky);
        add_mode([&](double x, double y) { return std::sin(pi * kx * x) * std::sin(pi * ky * y); },
                 rng.normal() * w);
      }
    }
  }
  const double m = max_abs(s);
  if (m > 0.0) {
    for (double& v : s) v /= m;
  }
  return s;
}

namespace {

void clamp_to_ball(VectorField& d) {
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double r = std::hypot(d.c[0][k], d.c[1][k]);
    if (r > 1.0) {
      d.c[0][k] /= r;
      d.c[1][k] /= r;
    }
  }
}

// A +1/-1 defect pair. In periodic mode the offsets are replaced by
// sin(2 pi dx) / (2 pi) so the field is smooth on the torus.
VectorField vortex_pair(const Grid& g, double angle, double core) {
  constexpr double pi = std::numbers::pi;
  VectorField d(g, FieldRole::director);
  const double x1 = 0.3, x2 = 0.7, yc = 0.5;
  auto offset = [&](double z) {
    return g.bc == BcMode::periodic ? std::sin(2.0 * pi * z) / (2.0 * pi) : z;
  };
  const std::complex<double> rot = std::polar(1.0, angle);
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.ny; ++j) {
      const double x = g.x(i), y = g.y(j);
      const std::complex<double> a(offset(x - x1), offset(y - yc));
      const std::complex<double> b(offset(x - x2), offset(y - yc));
      std::complex<double> w = a * std::conj(b);
      const double r = std::abs(w);
      const double scale_r = std::sqrt(std::abs(a) * std::abs(b));
      w = r > 0.0 ? rot * (w / r) * std::tanh(scale_r / core) : 0.0;
      d.set(g.index(i, j), {w.real(), w.imag()});
    }
  }
  return d;
}

}  // namespace

VectorField make_director(const Grid& g, const InitSpec& spec) {
  const Vec2 n{std::cos(spec.angle), std::sin(spec.angle)};
  VectorField d(g, FieldRole::director);
  SeededRng rng(spec.seed);
  switch (spec.kind) {
    case InitKind::zero:
      return d;
    case InitKind::unit:
      return VectorField(g, FieldRole::director, n[0], n[1]);
    case InitKind::perturbed_unit: {
      const Samples p0 = smooth_random(g, FieldRole::director, spec.k_max, rng);
      const Samples p1 = smooth_random(g, FieldRole::director, spec.k_max, rng);
      for (std::size_t k = 0; k < d.size(); ++k) {
        d.c[0][k] = n[0] + spec.amplitude * p0[k];
        d.c[1][k] = n[1] + spec.amplitude * p1[k];
      }
      break;
    }
    case InitKind::random: {
      d.c[0] = smooth_random(g, FieldRole::director, spec.k_max, rng);
      d.c[1] = smooth_random(g, FieldRole::director, spec.k_max, rng);
      const double m = max_magnitude(d);
      if (m > 0.0) scale(d, spec.amplitude / m);
      break;
    }
    case InitKind::vortex_pair:
      d = vortex_pair(g, spec.angle, spec.core);
      break;
  }
  if (spec.clamp) clamp_to_ball(d);
  return d;
}

VectorField make_velocity(const FieldOps& ops, double energy, int k_max, SeededRng& rng) {
  const Grid& g = ops.grid();
  VectorField u(g, FieldRole::velocity);
  if (!(energy > 0.0)) return u;
  u.c[0] = smooth_random(g, FieldRole::velocity, std::max(1, k_max), rng);
  u.c[1] = smooth_random(g, FieldRole::velocity, std::max(1, k_max), rng);
  u = ops.leray_project(u);
  const double ke = 0.5 * inner(u, u);
  if (ke > 0.0) scale(u, std::sqrt(energy / ke));
  return u;
}

State make_initial_state(const Model& model, const InitSpec& spec) {
  VectorField d = make_director(model.grid(), spec);
  VectorField u(model.grid(), FieldRole::velocity);
  if (spec.velocity_energy > 0.0 && !model.options().freeze_velocity) {
    // Separate stream so the director does not depend on velocity_energy.
    SeededRng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    u = make_velocity(model.ops(), spec.velocity_energy, spec.k_max, rng);
  }
  return model.make_state(std::move(d), std::move(u));
}

}  // namespace nematic
