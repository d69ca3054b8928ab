#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nematic/dynamics.hpp"

namespace nematic {

enum class Classification { constant_unit, zero, other };
std::string to_string(Classification c);

enum class StationaryMethod { gradient_flow, newton };
std::string to_string(StationaryMethod m);
StationaryMethod stationary_method_from_string(const std::string& name);

struct SpectrumEntry {
  double value = 0.0;
  int multiplicity = 0;
};

/// -L Lap z + f(z) on the grid.
VectorField stationary_residual(const Model& model, const VectorField& z);

/// Configuration energy 1/2 int (L |grad z|^2 + psi_hat(|z|^2) - |z|^2).
double configuration_energy(const Model& model, const VectorField& z);

/// constant_unit if the RMS deviation of z from its mean is <= tol and
/// ||z| - 1| <= tol pointwise; zero if |z| <= tol pointwise; other otherwise.
Classification classify(const VectorField& z, double tol = 1e-5);

/// L(zbar) w = -L Lap w + psi(|zbar|^2) w + 2 psi'(|zbar|^2) (zbar (x) zbar) w - w,
/// the Jacobian of `stationary_residual` at zbar.
VectorField linearized_apply(const Model& model, const VectorField& zbar, const VectorField& w);

/// Dense matrix of the linearized operator in the basis (d_x samples, d_y
/// samples). Small grids only.
Eigen::MatrixXd linearized_matrix(const Model& model, const VectorField& zbar);

enum class EigenMethod { automatic, dense, krylov };

struct KernelOptions {
  double zero_tol = 0.0;  // <= 0: 1e-8 * lambda_max
  int count = 8;          // number of smallest eigenvalues returned
  EigenMethod method = EigenMethod::automatic;
  int block_size = 8;
  int block_steps = 10;
  int max_restarts = 8;
  double residual_tol = 1e-9;  // eigenpair residual relative to lambda_max
  unsigned seed = 1;
};

struct KernelReport {
  int kernel_dim = 0;
  std::vector<double> eigenvalues;  // `count` smallest, ascending
  std::vector<SpectrumEntry> low_spectrum;
  double smallest_nonzero = 0.0;  // first eigenvalue with |lambda| > zero_tol
  double lambda_max = 0.0;
  double zero_tol = 0.0;
  double max_residual = 0.0;  // worst ||A x - lambda x|| / lambda_max over returned pairs
  bool converged = false;
  std::string method;
};

/// Counts eigenvalues of the linearized operator with |lambda| <= zero_tol.
/// The Krylov path runs block Lanczos on (A + 2 I)^-1 (A + 2 I >= I because
/// psi, psi' >= 0), applied by preconditioned CG, followed by Rayleigh-Ritz
/// on A. lambda_max comes from Lanczos on A.
KernelReport kernel_dimension(const Model& model, const VectorField& zbar,
                              const KernelOptions& options = {});

/// Groups sorted eigenvalues whose spread is within tol into (value, count).
std::vector<SpectrumEntry> group_spectrum(const std::vector<double>& sorted, double tol);

struct StationaryOptions {
  StationaryMethod method = StationaryMethod::gradient_flow;
  double tol = 1e-9;  // on ||-L Lap z + f(z)||
  int max_iter = 50;  // Newton iterations
  double max_time = 2e4;  // gradient-flow pseudo time
  long max_steps = 400000;
  double classify_tol = 1e-5;
  bool compute_kernel = true;
  KernelOptions kernel;
};

struct StationaryReport {
  VectorField z;
  double residual_norm = 0.0;
  double energy = 0.0;
  Classification classification = Classification::other;
  int kernel_dim = -1;  // -1 if not computed
  std::vector<SpectrumEntry> low_spectrum;
  std::vector<double> eigenvalues;
  double smallest_nonzero = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string method_used;
  std::string message;
};

/// Solves -L Lap z + f(z) = 0. gradient_flow runs the director-only stepper;
/// newton uses CG on the linearized operator with a backtracking line search
/// and falls back to gradient_flow when CG meets negative curvature or the
/// line search stalls. On non-convergence the best iterate is reported.
StationaryReport solve_stationary(const Model& model, const VectorField& z0,
                                  const StationaryOptions& options = {});

struct CriterionReport {
  std::string name;
  bool pass = false;
  std::vector<std::pair<std::string, double>> metrics;
  std::string notes;

  double metric(const std::string& key) const;
};

/// Compares L with the squared discrete Poincare-Wirtinger constant
/// c^2 = 1 / (smallest nonzero eigenvalue of -Lap on director fields).
CriterionReport check_large_L(const ModelParams& params, const Grid& grid);

/// Samples psi_hat(r) - r >= kappa (1 - r)^sigma on [0, 1] and reports the
/// controlled quantity (2 EE0 / kappa)^(1/sigma) against epsilon.
/// Throws std::invalid_argument for delta > 0 or max |d0| > 1.
CriterionReport check_small_energy(const Model& model, const State& s0, double kappa,
                                   double sigma, double epsilon);

}  // namespace nematic
