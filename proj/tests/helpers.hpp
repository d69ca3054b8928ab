#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include "nematic/init.hpp"

namespace testing {

using namespace nematic;
inline constexpr double pi = std::numbers::pi;

inline Samples sample(const Grid& g, const std::function<double(double, double)>& fn) {
  Samples s(g.size());
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.ny; ++j) s[g.index(i, j)] = fn(g.x(i), g.y(j));
  }
  return s;
}

inline VectorField vector_field(const Grid& g, FieldRole role,
                                const std::function<double(double, double)>& f0,
                                const std::function<double(double, double)>& f1) {
  VectorField v(g, role);
  v.c[0] = sample(g, f0);
  v.c[1] = sample(g, f1);
  return v;
}

/// Uncorrelated standard normal samples.
inline VectorField white_noise(const Grid& g, FieldRole role, SeededRng& rng) {
  VectorField v(g, role);
  for (auto& c : v.c) {
    for (double& x : c) x = rng.normal();
  }
  return v;
}

inline Samples white_noise(const Grid& g, SeededRng& rng) {
  Samples s(g.size());
  for (double& x : s) x = rng.normal();
  return s;
}

inline VectorField smooth_field(const Grid& g, FieldRole role, int k_max, SeededRng& rng) {
  VectorField v(g, role);
  v.c[0] = smooth_random(g, role, k_max, rng);
  v.c[1] = smooth_random(g, role, k_max, rng);
  return v;
}

inline double max_diff(const Samples& a, const Samples& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double max_diff(const VectorField& a, const VectorField& b) {
  return std::max(max_diff(a.c[0], b.c[0]), max_diff(a.c[1], b.c[1]));
}

inline double max_abs(const VectorField& a) {
  return std::max(nematic::max_abs(a.c[0]), nematic::max_abs(a.c[1]));
}

}  // namespace testing
