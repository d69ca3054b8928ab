#pragma once

// Preconditioned Krylov solvers over VectorField with the grid inner product.

#include <cmath>
#include <functional>

#include "nematic/grid.hpp"

namespace nematic::detail {

using LinearMap = std::function<VectorField(const VectorField&)>;

struct KrylovResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  bool breakdown = false;  // CG hit non-positive curvature
};

/// Preconditioned conjugate gradients for a symmetric operator. Stops on
/// non-positive curvature and returns the current iterate.
inline KrylovResult pcg(const LinearMap& apply, const LinearMap& precond, const VectorField& b,
                        VectorField& x, double rel_tol, int max_iter) {
  KrylovResult res;
  const double bnorm = norm(b);
  if (bnorm == 0.0) {
    x = b;
    scale(x, 0.0);
    res.converged = true;
    return res;
  }
  VectorField r = b - apply(x);
  VectorField z = precond(r);
  VectorField p = z;
  double rz = inner(r, z);
  for (int it = 0; it < max_iter; ++it) {
    res.relative_residual = norm(r) / bnorm;
    if (res.relative_residual <= rel_tol) {
      res.converged = true;
      res.iterations = it;
      return res;
    }
    const VectorField ap = apply(p);
    const double pap = inner(p, ap);
    if (!(pap > 0.0)) {
      res.breakdown = true;
      res.iterations = it;
      return res;
    }
    const double alpha = rz / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    z = precond(r);
    const double rz_new = inner(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int c = 0; c < 2; ++c) {
      for (std::size_t k = 0; k < p.size(); ++k) p.c[c][k] = z.c[c][k] + beta * p.c[c][k];
    }
  }
  res.iterations = max_iter;
  res.relative_residual = norm(r) / bnorm;
  res.converged = res.relative_residual <= rel_tol;
  return res;
}

/// Right-preconditioned BiCGSTAB for the non-symmetric transport solves.
inline KrylovResult bicgstab(const LinearMap& apply, const LinearMap& precond,
                             const VectorField& b, VectorField& x, double rel_tol, int max_iter) {
  KrylovResult res;
  const double bnorm = norm(b);
  if (bnorm == 0.0) {
    x = b;
    scale(x, 0.0);
    res.converged = true;
    return res;
  }
  VectorField r = b - apply(x);
  const VectorField r_hat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  VectorField v = r, p = r;
  scale(v, 0.0);
  scale(p, 0.0);
  for (int it = 0; it < max_iter; ++it) {
    res.relative_residual = norm(r) / bnorm;
    if (res.relative_residual <= rel_tol) {
      res.converged = true;
      res.iterations = it;
      return res;
    }
    const double rho_new = inner(r_hat, r);
    if (rho_new == 0.0 || omega == 0.0) {
      res.breakdown = true;
      res.iterations = it;
      return res;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (int c = 0; c < 2; ++c) {
      for (std::size_t k = 0; k < p.size(); ++k) {
        p.c[c][k] = r.c[c][k] + beta * (p.c[c][k] - omega * v.c[c][k]);
      }
    }
    const VectorField p_hat = precond(p);
    v = apply(p_hat);
    alpha = rho / inner(r_hat, v);
    VectorField s = r;
    axpy(-alpha, v, s);
    if (norm(s) / bnorm <= rel_tol) {
      axpy(alpha, p_hat, x);
      res.converged = true;
      res.iterations = it + 1;
      res.relative_residual = norm(s) / bnorm;
      return res;
    }
    const VectorField s_hat = precond(s);
    const VectorField t = apply(s_hat);
    const double tt = inner(t, t);
    omega = tt > 0.0 ? inner(t, s) / tt : 0.0;
    axpy(alpha, p_hat, x);
    axpy(omega, s_hat, x);
    r = s;
    axpy(-omega, t, r);
  }
  res.iterations = max_iter;
  res.relative_residual = norm(r) / bnorm;
  res.converged = res.relative_residual <= rel_tol;
  return res;
}

}  // namespace nematic::detail
