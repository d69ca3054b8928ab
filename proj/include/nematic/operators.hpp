#pragma once

#include <memory>

#include "nematic/grid.hpp"

namespace nematic {

/// Ghost-point convention for one finite-difference derivative. Even
/// reflection gives zero normal derivative, odd reflection a zero wall value.
/// Ignored in periodic mode.
enum class Ghost { even, odd };

inline Ghost ghost_for(FieldRole role) {
  return role == FieldRole::velocity ? Ghost::odd : Ghost::even;
}

class Transforms;

/// Discrete differential operators on one grid.
///
/// Periodic mode is Fourier collocation: first derivatives use i 2 pi k with
/// the Nyquist mode zeroed, the Laplacian the full symbol -|2 pi k|^2.
/// dirichlet_neumann mode uses second-order centred differences with ghost
/// reflection; the pairs (velocity gradient, tensor divergence) and
/// (pressure gradient, velocity divergence) are exact negative adjoints.
///
/// Index conventions:
///   (u.grad d)_i = u_j d_j d_i        (d.grad u)_i = d_j d_j u_i
///   (grad u)_ij  = d_j u_i            (a (x) b)_ij = a_i b_j
///   (grad d . grad d)_ij = d_i d_k d_j d_k
///
/// All methods are const and allocate their outputs, so one instance can be
/// used from several threads.
class FieldOps {
 public:
  explicit FieldOps(const Grid& grid);
  ~FieldOps();
  FieldOps(const FieldOps&) = delete;
  FieldOps& operator=(const FieldOps&) = delete;

  const Grid& grid() const { return grid_; }

  Samples derivative(const Samples& a, int axis, Ghost ghost) const;
  Samples laplacian(const Samples& a, Ghost ghost) const;

  ScalarField laplacian(const ScalarField& s) const;  // even ghost
  VectorField laplacian(const VectorField& v) const;

  /// Gradient of a pressure-like scalar (even ghost).
  VectorField gradient(const ScalarField& s) const;
  /// Divergence of a velocity-like field (odd ghost); minus the adjoint of
  /// `gradient`.
  ScalarField divergence(const VectorField& v) const;

  /// (grad u)_ij = d_j u_i with the ghost of u's role.
  TensorField vector_gradient(const VectorField& u) const;
  /// (div T)_i = d_j T_ij, minus the adjoint of the velocity gradient.
  VectorField tensor_divergence(const TensorField& t) const;

  VectorField advect(const VectorField& u, const VectorField& d) const;
  VectorField stretch(const VectorField& d, const VectorField& u) const;
  TensorField ericksen_stress(const VectorField& d) const;
  TensorField stretch_stress(const VectorField& d, const VectorField& g) const;

  /// (grad d)^T m, i.e. sum_k m_k d_j d_k. Pairs exactly with `advect`:
  /// <elastic_force(d, m), u> = <advect(u, d), m>.
  VectorField elastic_force(const VectorField& d, const VectorField& m) const;

  /// Skew-symmetric convection (div(u (x) u) + u.grad u) / 2, dealiased.
  VectorField convection(const VectorField& u) const;

  /// Orthogonal projection onto discretely divergence-free fields. When
  /// `potential` is given it receives phi with v - P v = gradient(phi).
  VectorField leray_project(const VectorField& v, ScalarField* potential = nullptr) const;

  /// Solves (c I - a Lap) x = rhs componentwise with the role's boundary
  /// convention; c > 0, a >= 0 (or c = 0 on mean-free data in periodic mode
  /// is not supported).
  VectorField solve_shifted(const VectorField& rhs, double c, double a) const;

  /// 2/3-rule truncation in periodic mode; identity otherwise.
  void dealias(Samples& a) const;
  void dealias(VectorField& v) const;

  /// Smallest nonzero and largest eigenvalue of -Lap for director fields.
  double laplacian_min_nonzero_eigenvalue() const;
  double laplacian_max_eigenvalue() const;

 private:
  Grid grid_;
  std::unique_ptr<Transforms> tr_;
};

}  // namespace nematic
