#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "nematic/potential.hpp"

namespace nematic {

enum class BcMode { periodic, dirichlet_neumann };

std::string to_string(BcMode mode);
BcMode bc_mode_from_string(const std::string& name);

/// Uniform mesh of the unit square, |Omega| = 1.
///
/// Periodic mode samples x_i = i h (trigonometric collocation). The
/// dirichlet_neumann mode is cell centred, x_i = (i + 1/2) h, with walls on
/// the cell faces. Samples are stored x-major: index = i * ny + j.
struct Grid {
  int nx = 0;
  int ny = 0;
  BcMode bc = BcMode::periodic;

  Grid() = default;
  Grid(int nx, int ny, BcMode bc);

  double hx() const { return 1.0 / nx; }
  double hy() const { return 1.0 / ny; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j);
  }
  double x(int i) const { return bc == BcMode::periodic ? i * hx() : (i + 0.5) * hx(); }
  double y(int j) const { return bc == BcMode::periodic ? j * hy() : (j + 0.5) * hy(); }

  bool operator==(const Grid&) const = default;
};

using Samples = std::vector<double>;

struct ScalarField {
  Samples v;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double value = 0.0) : v(g.size(), value) {}
};

/// Velocity components vanish on the walls (odd ghost reflection); director
/// components have zero normal derivative (even ghost reflection). The tag
/// only matters in dirichlet_neumann mode.
enum class FieldRole { velocity, director };

struct VectorField {
  FieldRole role = FieldRole::director;
  std::array<Samples, 2> c;

  VectorField() = default;
  VectorField(const Grid& g, FieldRole r, double v0 = 0.0, double v1 = 0.0)
      : role(r), c{Samples(g.size(), v0), Samples(g.size(), v1)} {}

  std::size_t size() const { return c[0].size(); }
  Vec2 at(std::size_t k) const { return {c[0][k], c[1][k]}; }
  void set(std::size_t k, const Vec2& value) {
    c[0][k] = value[0];
    c[1][k] = value[1];
  }
};

/// 2x2 tensor per grid point, component (a, b) stored in c[2 a + b].
struct TensorField {
  std::array<Samples, 4> c;

  TensorField() = default;
  explicit TensorField(const Grid& g) {
    for (auto& s : c) s.assign(g.size(), 0.0);
  }
  Samples& operator()(int a, int b) { return c[2 * a + b]; }
  const Samples& operator()(int a, int b) const { return c[2 * a + b]; }
};

// Discrete L2 algebra. Inner products are grid averages, which is the
// quadrature rule for |Omega| = 1.
double mean(const Samples& a);
double inner(const Samples& a, const Samples& b);
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
double inner(const TensorField& a, const TensorField& b);
double norm(const ScalarField& a);
double norm(const VectorField& a);
double norm(const TensorField& a);
double max_abs(const Samples& a);
double max_magnitude(const VectorField& a);  // max over points of |a(x)|
bool all_finite(const VectorField& a);
bool all_finite(const ScalarField& a);

void axpy(double alpha, const VectorField& x, VectorField& y);  // y += alpha x
void scale(VectorField& x, double alpha);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double alpha, const VectorField& a);

}  // namespace nematic
