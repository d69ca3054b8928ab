#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "nematic/dynamics.hpp"

namespace nematic {

/// Portable generator: mt19937_64 with explicit bit-to-double conversion and
/// Box-Muller, so a seed gives the same stream on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum class InitKind { unit, zero, perturbed_unit, random, vortex_pair };
std::string to_string(InitKind kind);
InitKind init_kind_from_string(const std::string& name);

struct InitSpec {
  InitKind kind = InitKind::perturbed_unit;
  std::uint64_t seed = 0;
  double amplitude = 1e-2;  // max |perturbation| (perturbed_unit) or max |d| (random)
  int k_max = 4;            // highest mode of the smooth random fields
  double angle = 0.0;       // direction of the unit director
  double velocity_energy = 0.0;  // kinetic energy of the random div-free velocity
  bool clamp = true;        // rescale d pointwise into the closed unit ball
  double core = 0.08;       // vortex_pair core radius
};

/// Smooth random scalar field with modes up to k_max, compatible with the
/// role's boundary convention, normalised to max |s| = 1 (zero if k_max = 0).
Samples smooth_random(const Grid& g, FieldRole role, int k_max, SeededRng& rng);

VectorField make_director(const Grid& g, const InitSpec& spec);
/// Divergence-free velocity with 1/2 ||u||^2 = energy.
VectorField make_velocity(const FieldOps& ops, double energy, int k_max, SeededRng& rng);

/// Director from make_director and, when velocity_energy > 0 and the velocity
/// is not frozen, a random velocity drawn from the same stream.
State make_initial_state(const Model& model, const InitSpec& spec);

}  // namespace nematic
