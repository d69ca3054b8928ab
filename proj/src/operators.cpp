#include "nematic/operators.hpp"

#include <cmath>
#include <numbers>

#include "transforms.hpp"

namespace nematic {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Signed wavenumber of FFT index `i` on an axis of length n.
int wavenumber(int i, int n) { return i <= n / 2 ? i : i - n; }

// Wavenumber used by first derivatives: Nyquist is dropped so that the
// derivative of a real field stays real and skew-adjoint.
double derivative_wavenumber(int i, int n) {
  const int k = wavenumber(i, n);
  return (2 * k == n || 2 * k == -n) ? 0.0 : kTwoPi * k;
}

Samples product(const Samples& a, const Samples& b) {
  Samples r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] * b[k];
  return r;
}

void add_to(Samples& y, const Samples& x, double alpha = 1.0) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += alpha * x[k];
}

}  // namespace

FieldOps::FieldOps(const Grid& grid) : grid_(grid), tr_(std::make_unique<Transforms>(grid)) {}

FieldOps::~FieldOps() = default;

Samples FieldOps::derivative(const Samples& a, int axis, Ghost ghost) const {
  const int nx = grid_.nx, ny = grid_.ny;
  if (grid_.bc == BcMode::periodic) {
    Spectrum s = tr_->forward(a);
    const int nyc = tr_->nyc();
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < nyc; ++j) {
        const double k = axis == 0 ? derivative_wavenumber(i, nx) : derivative_wavenumber(j, ny);
        s[static_cast<std::size_t>(i) * nyc + j] *= std::complex<double>(0.0, k);
      }
    }
    return tr_->inverse(std::move(s));
  }

  const double sgn = ghost == Ghost::even ? 1.0 : -1.0;
  Samples r(a.size());
  if (axis == 0) {
    const double inv = 0.5 / grid_.hx();
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        const double lo = i > 0 ? a[grid_.index(i - 1, j)] : sgn * a[grid_.index(0, j)];
        const double hi = i < nx - 1 ? a[grid_.index(i + 1, j)] : sgn * a[grid_.index(nx - 1, j)];
        r[grid_.index(i, j)] = (hi - lo) * inv;
      }
    }
  } else {
    const double inv = 0.5 / grid_.hy();
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        const double lo = j > 0 ? a[grid_.index(i, j - 1)] : sgn * a[grid_.index(i, 0)];
        const double hi = j < ny - 1 ? a[grid_.index(i, j + 1)] : sgn * a[grid_.index(i, ny - 1)];
        r[grid_.index(i, j)] = (hi - lo) * inv;
      }
    }
  }
  return r;
}

Samples FieldOps::laplacian(const Samples& a, Ghost ghost) const {
  const int nx = grid_.nx, ny = grid_.ny;
  if (grid_.bc == BcMode::periodic) {
    Spectrum s = tr_->forward(a);
    const int nyc = tr_->nyc();
    for (int i = 0; i < nx; ++i) {
      const double kx = kTwoPi * wavenumber(i, nx);
      for (int j = 0; j < nyc; ++j) {
        const double ky = kTwoPi * j;
        s[static_cast<std::size_t>(i) * nyc + j] *= -(kx * kx + ky * ky);
      }
    }
    return tr_->inverse(std::move(s));
  }

  const double sgn = ghost == Ghost::even ? 1.0 : -1.0;
  const double ix2 = 1.0 / (grid_.hx() * grid_.hx());
  const double iy2 = 1.0 / (grid_.hy() * grid_.hy());
  Samples r(a.size());
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double c = a[grid_.index(i, j)];
      const double w = i > 0 ? a[grid_.index(i - 1, j)] : sgn * c;
      const double e = i < nx - 1 ? a[grid_.index(i + 1, j)] : sgn * c;
      const double s = j > 0 ? a[grid_.index(i, j - 1)] : sgn * c;
      const double n = j < ny - 1 ? a[grid_.index(i, j + 1)] : sgn * c;
      r[grid_.index(i, j)] = (w - 2.0 * c + e) * ix2 + (s - 2.0 * c + n) * iy2;
    }
  }
  return r;
}

ScalarField FieldOps::laplacian(const ScalarField& s) const {
  ScalarField r;
  r.v = laplacian(s.v, Ghost::even);
  return r;
}

VectorField FieldOps::laplacian(const VectorField& v) const {
  VectorField r;
  r.role = v.role;
  for (int c = 0; c < 2; ++c) r.c[c] = laplacian(v.c[c], ghost_for(v.role));
  return r;
}

VectorField FieldOps::gradient(const ScalarField& s) const {
  VectorField r;
  r.role = FieldRole::velocity;
  r.c[0] = derivative(s.v, 0, Ghost::even);
  r.c[1] = derivative(s.v, 1, Ghost::even);
  return r;
}

ScalarField FieldOps::divergence(const VectorField& v) const {
  ScalarField r;
  r.v = derivative(v.c[0], 0, Ghost::odd);
  add_to(r.v, derivative(v.c[1], 1, Ghost::odd));
  return r;
}

TensorField FieldOps::vector_gradient(const VectorField& u) const {
  TensorField t;
  const Ghost g = ghost_for(u.role);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) t(a, b) = derivative(u.c[a], b, g);
  }
  return t;
}

VectorField FieldOps::tensor_divergence(const TensorField& t) const {
  VectorField r;
  r.role = FieldRole::velocity;
  for (int a = 0; a < 2; ++a) {
    r.c[a] = derivative(t(a, 0), 0, Ghost::even);
    add_to(r.c[a], derivative(t(a, 1), 1, Ghost::even));
  }
  return r;
}

VectorField FieldOps::advect(const VectorField& u, const VectorField& d) const {
  const TensorField gd = vector_gradient(d);
  VectorField r;
  r.role = d.role;
  for (int a = 0; a < 2; ++a) {
    r.c[a] = product(u.c[0], gd(a, 0));
    add_to(r.c[a], product(u.c[1], gd(a, 1)));
  }
  return r;
}

VectorField FieldOps::stretch(const VectorField& d, const VectorField& u) const {
  const TensorField gu = vector_gradient(u);
  VectorField r;
  r.role = d.role;
  for (int a = 0; a < 2; ++a) {
    r.c[a] = product(d.c[0], gu(a, 0));
    add_to(r.c[a], product(d.c[1], gu(a, 1)));
  }
  return r;
}

TensorField FieldOps::ericksen_stress(const VectorField& d) const {
  const TensorField gd = vector_gradient(d);
  TensorField t;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      t(a, b) = product(gd(0, a), gd(0, b));
      add_to(t(a, b), product(gd(1, a), gd(1, b)));
    }
  }
  return t;
}

TensorField FieldOps::stretch_stress(const VectorField& d, const VectorField& g) const {
  TensorField t;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) t(a, b) = product(g.c[a], d.c[b]);
  }
  return t;
}

VectorField FieldOps::elastic_force(const VectorField& d, const VectorField& m) const {
  const TensorField gd = vector_gradient(d);
  VectorField r;
  r.role = FieldRole::velocity;
  for (int j = 0; j < 2; ++j) {
    r.c[j] = product(m.c[0], gd(0, j));
    add_to(r.c[j], product(m.c[1], gd(1, j)));
  }
  return r;
}

VectorField FieldOps::convection(const VectorField& u) const {
  TensorField uu;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      uu(a, b) = product(u.c[a], u.c[b]);
      dealias(uu(a, b));
    }
  }
  VectorField r = tensor_divergence(uu);
  VectorField adv = advect(u, u);
  dealias(adv);
  for (int a = 0; a < 2; ++a) {
    for (std::size_t k = 0; k < r.c[a].size(); ++k) r.c[a][k] = 0.5 * (r.c[a][k] + adv.c[a][k]);
  }
  r.role = FieldRole::velocity;
  return r;
}

VectorField FieldOps::leray_project(const VectorField& v, ScalarField* potential) const {
  const int nx = grid_.nx, ny = grid_.ny;
  if (grid_.bc == BcMode::periodic) {
    Spectrum sx = tr_->forward(v.c[0]);
    Spectrum sy = tr_->forward(v.c[1]);
    Spectrum phi(sx.size());
    const int nyc = tr_->nyc();
    for (int i = 0; i < nx; ++i) {
      const double kx = derivative_wavenumber(i, nx);
      for (int j = 0; j < nyc; ++j) {
        const double ky = derivative_wavenumber(j, ny);
        const double k2 = kx * kx + ky * ky;
        const std::size_t m = static_cast<std::size_t>(i) * nyc + j;
        if (k2 == 0.0) continue;
        const std::complex<double> kdotv = kx * sx[m] + ky * sy[m];
        sx[m] -= kx * kdotv / k2;
        sy[m] -= ky * kdotv / k2;
        phi[m] = std::complex<double>(0.0, -1.0) * kdotv / k2;
      }
    }
    VectorField r;
    r.role = FieldRole::velocity;
    r.c[0] = tr_->inverse(std::move(sx));
    r.c[1] = tr_->inverse(std::move(sy));
    if (potential) potential->v = tr_->inverse(std::move(phi));
    return r;
  }

  // Cell-centred: D G is diagonal in the DCT-II basis with symbol
  // -(sin^2(pi kx / nx) / hx^2 + sin^2(pi ky / ny) / hy^2).
  const ScalarField div = divergence(v);
  Samples p = tr_->trig_forward(div.v, Ghost::even);
  const double hx = grid_.hx(), hy = grid_.hy();
  for (int i = 0; i < nx; ++i) {
    const double sx = std::sin(std::numbers::pi * i / nx) / hx;
    for (int j = 0; j < ny; ++j) {
      const double sy = std::sin(std::numbers::pi * j / ny) / hy;
      const double sym = sx * sx + sy * sy;
      double& pk = p[grid_.index(i, j)];
      pk = sym > 0.0 ? -pk / sym : 0.0;
    }
  }
  ScalarField phi;
  phi.v = tr_->trig_inverse(std::move(p), Ghost::even);
  const VectorField gp = gradient(phi);
  VectorField r = v;
  r.role = FieldRole::velocity;
  axpy(-1.0, gp, r);
  if (potential) *potential = std::move(phi);
  return r;
}

VectorField FieldOps::solve_shifted(const VectorField& rhs, double c, double a) const {
  const int nx = grid_.nx, ny = grid_.ny;
  VectorField r;
  r.role = rhs.role;
  if (grid_.bc == BcMode::periodic) {
    const int nyc = tr_->nyc();
    for (int comp = 0; comp < 2; ++comp) {
      Spectrum s = tr_->forward(rhs.c[comp]);
      for (int i = 0; i < nx; ++i) {
        const double kx = kTwoPi * wavenumber(i, nx);
        for (int j = 0; j < nyc; ++j) {
          const double ky = kTwoPi * j;
          s[static_cast<std::size_t>(i) * nyc + j] /= c + a * (kx * kx + ky * ky);
        }
      }
      r.c[comp] = tr_->inverse(std::move(s));
    }
    return r;
  }

  const Ghost ghost = ghost_for(rhs.role);
  const int shift = ghost == Ghost::even ? 0 : 1;  // DST-II index k is frequency k + 1
  const double hx = grid_.hx(), hy = grid_.hy();
  for (int comp = 0; comp < 2; ++comp) {
    Samples s = tr_->trig_forward(rhs.c[comp], ghost);
    for (int i = 0; i < nx; ++i) {
      const double sx = 2.0 * std::sin(0.5 * std::numbers::pi * (i + shift) / nx) / hx;
      for (int j = 0; j < ny; ++j) {
        const double sy = 2.0 * std::sin(0.5 * std::numbers::pi * (j + shift) / ny) / hy;
        s[grid_.index(i, j)] /= c + a * (sx * sx + sy * sy);
      }
    }
    r.c[comp] = tr_->trig_inverse(std::move(s), ghost);
  }
  return r;
}

void FieldOps::dealias(Samples& a) const {
  if (grid_.bc != BcMode::periodic) return;
  const int nx = grid_.nx, ny = grid_.ny;
  const int kx_max = nx / 3, ky_max = ny / 3;
  Spectrum s = tr_->forward(a);
  const int nyc = tr_->nyc();
  for (int i = 0; i < nx; ++i) {
    const bool cut_x = std::abs(wavenumber(i, nx)) > kx_max;
    for (int j = 0; j < nyc; ++j) {
      if (cut_x || j > ky_max) s[static_cast<std::size_t>(i) * nyc + j] = 0.0;
    }
  }
  a = tr_->inverse(std::move(s));
}

void FieldOps::dealias(VectorField& v) const {
  dealias(v.c[0]);
  dealias(v.c[1]);
}

double FieldOps::laplacian_min_nonzero_eigenvalue() const {
  if (grid_.bc == BcMode::periodic) return kTwoPi * kTwoPi;
  auto lowest = [](int n, double h) {
    const double s = 2.0 * std::sin(0.5 * std::numbers::pi / n) / h;
    return s * s;
  };
  return std::min(lowest(grid_.nx, grid_.hx()), lowest(grid_.ny, grid_.hy()));
}

double FieldOps::laplacian_max_eigenvalue() const {
  if (grid_.bc == BcMode::periodic) {
    const double kx = kTwoPi * (grid_.nx / 2), ky = kTwoPi * (grid_.ny / 2);
    return kx * kx + ky * ky;
  }
  auto highest = [](int n, double h) {
    const double s = 2.0 * std::sin(0.5 * std::numbers::pi * (n - 1) / n) / h;
    return s * s;
  };
  return highest(grid_.nx, grid_.hx()) + highest(grid_.ny, grid_.hy());
}

}  // namespace nematic
