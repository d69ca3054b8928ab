#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace nematic {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<double, 4>;  // row-major 2x2

enum class PotentialFamily { ginzburg_landau, capped_gl, exp_saturating };

std::string to_string(PotentialFamily family);
PotentialFamily potential_family_from_string(const std::string& name);

/// Selects one member of the bulk potential family. `a` is only read by
/// exp_saturating. A non-positive `c_psi` means "use the family's bound".
struct PotentialSpec {
  PotentialFamily family = PotentialFamily::ginzburg_landau;
  double a = 2.0;
  double c_psi = 0.0;
};

/// psi, its derivative and its antiderivative psi_hat (normalised by
/// psi_hat(1) = 1), plus everything derived from them pointwise:
///
///   f(d)            = (psi(|d|^2) - 1) d
///   bulk_density(d) = (psi_hat(|d|^2) - |d|^2) / 2
///   Xi(d)           = psi_hat(|d|^2) / 2
///
/// Potentials are immutable values and safe to share between threads.
class Potential {
 public:
  using ScalarFn = std::function<double(double)>;

  explicit Potential(const PotentialSpec& spec);

  /// Assemble a potential from raw callables. Used to feed deliberately
  /// broken candidates through `validate`.
  Potential(std::string name, ScalarFn psi, ScalarFn dpsi, ScalarFn psi_hat,
            double c_psi);

  const std::string& name() const { return name_; }
  const PotentialSpec& spec() const { return spec_; }
  double c_psi() const { return c_psi_; }

  double psi(double r) const { return psi_(r); }
  double dpsi(double r) const { return dpsi_(r); }
  double psi_hat(double r) const { return psi_hat_(r); }

  Vec2 f(const Vec2& d) const;
  double bulk_density(const Vec2& d) const;
  double xi(const Vec2& d) const;
  Mat2 xi_hessian(const Vec2& d) const;

  /// Jacobian of f at d, i.e. Hessian of the bulk density:
  /// (psi - 1) I + 2 psi' d (x) d.
  Mat2 f_jacobian(const Vec2& d) const;

  /// Upper bound on the spectral radius of f_jacobian over |d|^2 <= r_max.
  double max_reaction(double r_max) const;

  /// A pair (kappa, sigma) with psi_hat(r) - r >= kappa (1 - r)^sigma on [0,1].
  /// Not claimed to be sharp.
  std::array<double, 2> lower_bound_pair() const;

 private:
  std::string name_;
  PotentialSpec spec_;
  ScalarFn psi_;
  ScalarFn dpsi_;
  ScalarFn psi_hat_;
  double c_psi_ = 0.0;
};

struct HypothesisCheck {
  std::string name;
  bool pass = false;
  double worst_violation = 0.0;
};

struct ValidationReport {
  std::string potential;
  double r_max = 0.0;
  std::vector<HypothesisCheck> checks;

  bool ok() const;
  /// First failing hypothesis, or an empty string.
  std::string first_failure() const;
};

/// Dense sampling check (4096 points per unit interval) of the potential
/// hypotheses on [0, r_max]. Tolerance 1e-10.
ValidationReport validate(const Potential& potential, double r_max);
ValidationReport validate(const PotentialSpec& spec, double r_max);

/// Like `validate`, but throws std::invalid_argument naming the first
/// violated hypothesis.
void require_valid(const Potential& potential, double r_max);

}  // namespace nematic
