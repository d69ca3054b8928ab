#include "nematic/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace nematic {

std::string to_string(BcMode mode) {
  return mode == BcMode::periodic ? "periodic" : "dirichlet_neumann";
}

BcMode bc_mode_from_string(const std::string& name) {
  if (name == "periodic") return BcMode::periodic;
  if (name == "dirichlet_neumann") return BcMode::dirichlet_neumann;
  throw std::invalid_argument("unknown bc_mode '" + name + "'");
}

Grid::Grid(int nx_, int ny_, BcMode bc_) : nx(nx_), ny(ny_), bc(bc_) {
  if (nx < 8 || ny < 8) throw std::invalid_argument("grid: nx and ny must be >= 8");
  auto pow2 = [](int n) { return (n & (n - 1)) == 0; };
  if (bc == BcMode::periodic && (!pow2(nx) || !pow2(ny))) {
    throw std::invalid_argument("grid: periodic mode needs power-of-two nx and ny");
  }
}

double mean(const Samples& a) {
  double s = 0.0;
  for (double x : a) s += x;
  return a.empty() ? 0.0 : s / static_cast<double>(a.size());
}

double inner(const Samples& a, const Samples& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return a.empty() ? 0.0 : s / static_cast<double>(a.size());
}

double inner(const ScalarField& a, const ScalarField& b) { return inner(a.v, b.v); }

double inner(const VectorField& a, const VectorField& b) {
  return inner(a.c[0], b.c[0]) + inner(a.c[1], b.c[1]);
}

double inner(const TensorField& a, const TensorField& b) {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += inner(a.c[k], b.c[k]);
  return s;
}

double norm(const ScalarField& a) { return std::sqrt(inner(a, a)); }
double norm(const VectorField& a) { return std::sqrt(inner(a, a)); }
double norm(const TensorField& a) { return std::sqrt(inner(a, a)); }

double max_abs(const Samples& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

double max_magnitude(const VectorField& a) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    m = std::max(m, std::hypot(a.c[0][k], a.c[1][k]));
  }
  return m;
}

bool all_finite(const VectorField& a) {
  for (const auto& comp : a.c) {
    for (double x : comp) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

bool all_finite(const ScalarField& a) {
  for (double x : a.v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void axpy(double alpha, const VectorField& x, VectorField& y) {
  for (int c = 0; c < 2; ++c) {
    for (std::size_t k = 0; k < x.size(); ++k) y.c[c][k] += alpha * x.c[c][k];
  }
}

void scale(VectorField& x, double alpha) {
  for (auto& comp : x.c) {
    for (double& v : comp) v *= alpha;
  }
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  VectorField r = a;
  axpy(1.0, b, r);
  return r;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  VectorField r = a;
  axpy(-1.0, b, r);
  return r;
}

VectorField operator*(double alpha, const VectorField& a) {
  VectorField r = a;
  scale(r, alpha);
  return r;
}

}  // namespace nematic
