#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "nematic/stationary.hpp"

using namespace nematic;
using testing::pi;

namespace {

ModelParams params(double L = 1.0, PotentialFamily family = PotentialFamily::ginzburg_landau) {
  ModelParams p;
  p.L = L;
  p.potential.family = family;
  return p;
}

VectorField constant(const Grid& g, double a, double b) { return VectorField(g, FieldRole::director, a, b); }

VectorField perturbed_unit(const Grid& g, std::uint64_t seed, double amplitude) {
  InitSpec s;
  s.kind = InitKind::perturbed_unit;
  s.seed = seed;
  s.amplitude = amplitude;
  return make_director(g, s);
}

const Grid kSmall{16, 16, BcMode::periodic};

}  // namespace

TEST_CASE("enum names round-trip") {
  for (auto m : {StationaryMethod::gradient_flow, StationaryMethod::newton})
    CHECK(stationary_method_from_string(to_string(m)) == m);
  CHECK_THROWS(stationary_method_from_string("bisection"));
  CHECK(to_string(Classification::constant_unit) == "constant_unit");
}

TEST_CASE("classify") {
  const Grid g = kSmall;
  CHECK(classify(constant(g, 0.6, 0.8)) == Classification::constant_unit);
  CHECK(classify(constant(g, 0.0, 0.0)) == Classification::zero);
  CHECK(classify(constant(g, 0.5, 0.0)) == Classification::other);
  CHECK(classify(perturbed_unit(g, 1, 0.1)) == Classification::other);
  CHECK(classify(perturbed_unit(g, 1, 1e-7)) == Classification::constant_unit);
}

TEST_CASE("solve_stationary: exact solutions are returned unchanged") {
  for (auto method : {StationaryMethod::gradient_flow, StationaryMethod::newton}) {
    INFO(to_string(method));
    const Model m(kSmall, params());
    StationaryOptions opt;
    opt.method = method;
    const StationaryReport unit = solve_stationary(m, constant(kSmall, 1.0, 0.0), opt);
    CHECK(unit.converged);
    CHECK(unit.residual_norm == 0.0);
    CHECK(unit.classification == Classification::constant_unit);
    CHECK(testing::max_diff(unit.z, constant(kSmall, 1.0, 0.0)) == 0.0);
    CHECK(unit.kernel_dim == 1);
    CHECK(std::abs(unit.energy) <= 1e-15);

    const StationaryReport zero = solve_stationary(m, constant(kSmall, 0.0, 0.0), opt);
    CHECK(zero.converged);
    CHECK(zero.classification == Classification::zero);
    CHECK(zero.residual_norm == 0.0);
    CHECK(zero.kernel_dim == 0);
    CHECK(zero.energy == doctest::Approx(0.25));
  }
}

TEST_CASE("solve_stationary: a perturbed unit vector relaxes to a constant") {
  for (auto method : {StationaryMethod::gradient_flow, StationaryMethod::newton}) {
    INFO(to_string(method));
    const Model m(kSmall, params());
    StationaryOptions opt;
    opt.method = method;
    const StationaryReport r = solve_stationary(m, perturbed_unit(kSmall, 3, 0.2), opt);
    CHECK(r.converged);
    CHECK(r.residual_norm <= 1e-9);
    CHECK(norm(stationary_residual(m, r.z)) == doctest::Approx(r.residual_norm));
    CHECK(r.classification == Classification::constant_unit);
    CHECK(r.kernel_dim == 1);
    CHECK(r.energy <= 1e-15);
  }
}

TEST_CASE("solve_stationary in finite-difference mode") {
  const Grid g(16, 16, BcMode::dirichlet_neumann);
  const Model m(g, params(0.5));
  const StationaryReport r = solve_stationary(m, perturbed_unit(g, 5, 0.2));
  CHECK(r.converged);
  CHECK(r.residual_norm <= 1e-9);
  CHECK(r.classification == Classification::constant_unit);
  CHECK(r.kernel_dim == 1);
}

TEST_CASE("solve_stationary reports non-convergence with the best iterate") {
  const Model m(kSmall, params(0.005));
  StationaryOptions opt;
  opt.max_time = 0.01;
  opt.compute_kernel = false;
  InitSpec s;
  s.kind = InitKind::random;
  s.seed = 2;
  const StationaryReport r = solve_stationary(m, make_director(kSmall, s), opt);
  CHECK_FALSE(r.converged);
  CHECK(std::isfinite(r.residual_norm));
  CHECK(r.residual_norm > 1e-9);
  CHECK_FALSE(r.message.empty());
  CHECK(r.kernel_dim == -1);
}

TEST_CASE("linearized_apply closed forms") {
  const Model m(kSmall, params(0.7));
  const VectorField zbar = constant(kSmall, 1.0, 0.0);
  CHECK(testing::max_abs(linearized_apply(m, zbar, constant(kSmall, 0.0, 1.0))) <= 1e-14);
  const VectorField two = linearized_apply(m, zbar, constant(kSmall, 1.0, 0.0));
  CHECK(testing::max_diff(two, constant(kSmall, 2.0, 0.0)) <= 1e-14);

  const VectorField w = testing::vector_field(
      kSmall, FieldRole::director, [](double, double) { return 0.0; },
      [](double x, double) { return std::sin(2 * pi * x); });
  VectorField expect = w;
  scale(expect, 0.7 * 4 * pi * pi);
  CHECK(testing::max_diff(linearized_apply(m, zbar, w), expect) <= 1e-10);
}

TEST_CASE("linearized operator is symmetric") {
  testing::SeededRng rng(7);
  for (const Grid& g : {Grid(32, 32, BcMode::periodic), Grid(24, 20, BcMode::dirichlet_neumann)}) {
    for (auto fam : {PotentialFamily::ginzburg_landau, PotentialFamily::capped_gl, PotentialFamily::exp_saturating}) {
      const Model m(g, params(0.3, fam));
      const VectorField zbar = testing::smooth_field(g, FieldRole::director, 3, rng);
      const VectorField v = testing::white_noise(g, FieldRole::director, rng);
      const VectorField w = testing::white_noise(g, FieldRole::director, rng);
      const double a = inner(linearized_apply(m, zbar, v), w);
      const double b = inner(v, linearized_apply(m, zbar, w));
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
  const Model m(Grid(8, 8, BcMode::periodic), params());
  const VectorField zbar = testing::smooth_field(m.grid(), FieldRole::director, 2, rng);
  const Eigen::MatrixXd A = linearized_matrix(m, zbar);
  CHECK(A.rows() == 128);
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * A.cwiseAbs().maxCoeff());
}

TEST_CASE("linearized operator is the Jacobian of the residual") {
  testing::SeededRng rng(11);
  const double eps = 1e-5;
  for (const Grid& g : {Grid(32, 32, BcMode::periodic), Grid(24, 20, BcMode::dirichlet_neumann)}) {
    for (auto fam : {PotentialFamily::ginzburg_landau, PotentialFamily::exp_saturating}) {
      const Model m(g, params(0.5, fam));
      const VectorField zbar = testing::smooth_field(g, FieldRole::director, 3, rng);
      const VectorField w = testing::smooth_field(g, FieldRole::director, 3, rng);
      const VectorField fd =
          (1.0 / (2 * eps)) * (stationary_residual(m, zbar + eps * w) - stationary_residual(m, zbar - eps * w));
      CHECK(norm(linearized_apply(m, zbar, w) - fd) <= 1e-6);
    }
  }
}

TEST_CASE("kernel at a constant unit vector") {
  const Model m(kSmall, params(1.0));
  const KernelReport k = kernel_dimension(m, constant(kSmall, 1.0, 0.0));
  CHECK(k.converged);
  CHECK(k.kernel_dim == 1);
  CHECK(k.smallest_nonzero == doctest::Approx(2.0).epsilon(1e-9));
  REQUIRE(k.eigenvalues.size() == 8);
  CHECK(std::abs(k.eigenvalues[0]) <= k.zero_tol);
  CHECK(k.zero_tol == doctest::Approx(1e-8 * k.lambda_max));
  // next band: the four lowest Fourier modes of the orthogonal component at 4 pi^2 L
  CHECK(k.eigenvalues[2] == doctest::Approx(4 * pi * pi).epsilon(1e-9));
  REQUIRE(k.low_spectrum.size() >= 3);
  CHECK(k.low_spectrum[0].multiplicity == 1);
  CHECK(k.low_spectrum[1].value == doctest::Approx(2.0));
  CHECK(k.low_spectrum[2].multiplicity == 4);
  CHECK(k.eigenvalues[6] == doctest::Approx(4 * pi * pi + 2).epsilon(1e-9));
}

TEST_CASE("normal hyperbolicity for every family") {
  for (auto fam : {PotentialFamily::ginzburg_landau, PotentialFamily::capped_gl, PotentialFamily::exp_saturating}) {
    for (double L : {0.01, 0.1, 1.0}) {
      const Model m(kSmall, params(L, fam));
      const KernelReport k = kernel_dimension(m, constant(kSmall, 0.6, 0.8));
      const double gap = std::min(2 * m.potential().dpsi(1.0), L * m.ops().laplacian_min_nonzero_eigenvalue());
      CHECK(k.kernel_dim == 1);
      CHECK(k.smallest_nonzero >= gap - 1e-9);
      CHECK(k.smallest_nonzero == doctest::Approx(gap).epsilon(1e-9));
    }
  }
}

TEST_CASE("kernel at the zero state") {
  const Model m(kSmall, params());
  const KernelReport k = kernel_dimension(m, constant(kSmall, 0.0, 0.0));
  CHECK(k.kernel_dim == 0);
  CHECK(k.eigenvalues.front() == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(k.low_spectrum.front().multiplicity == 2);
}

TEST_CASE("dense and Krylov eigensolvers agree") {
  testing::SeededRng rng(13);
  for (const Grid& g : {Grid(16, 16, BcMode::periodic), Grid(16, 12, BcMode::dirichlet_neumann)}) {
    const Model m(g, params(0.2));
    // a non-equilibrium zbar still gives a symmetric operator to compare on
    const VectorField zbar = testing::smooth_field(g, FieldRole::director, 2, rng);
    KernelOptions dense, krylov;
    dense.method = EigenMethod::dense;
    krylov.method = EigenMethod::krylov;
    const KernelReport a = kernel_dimension(m, zbar, dense);
    const KernelReport b = kernel_dimension(m, zbar, krylov);
    CHECK(a.method == "dense");
    CHECK(b.method == "krylov");
    CHECK(b.converged);
    REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
    for (std::size_t k = 0; k < a.eigenvalues.size(); ++k)
      CHECK(b.eigenvalues[k] == doctest::Approx(a.eigenvalues[k]).epsilon(1e-7).scale(1.0));
    CHECK(b.lambda_max == doctest::Approx(a.lambda_max).epsilon(1e-3));
  }
}

TEST_CASE("Krylov kernel count on a larger grid") {
  const Grid g(64, 64, BcMode::periodic);
  const Model m(g, params(1.0));
  const KernelReport k = kernel_dimension(m, constant(g, 1.0, 0.0));
  CHECK(k.method == "krylov");
  CHECK(k.converged);
  CHECK(k.kernel_dim == 1);
  CHECK(k.smallest_nonzero == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("group_spectrum") {
  const auto groups = group_spectrum({-1.0, -1.0, 0.0, 2.0, 2.0 + 1e-12, 5.0}, 1e-9);
  REQUIRE(groups.size() == 4);
  CHECK(groups[0].multiplicity == 2);
  CHECK(groups[2].value == doctest::Approx(2.0));
  CHECK(groups[2].multiplicity == 2);
  CHECK(group_spectrum({}, 1.0).empty());
}

TEST_CASE("check_large_L") {
  const Grid g(32, 32, BcMode::periodic);
  const CriterionReport pass = check_large_L(params(1.0), g);
  CHECK(pass.pass);
  CHECK(pass.metric("c_omega") == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-12));
  CHECK(pass.metric("threshold") == doctest::Approx(0.025330295910584444).epsilon(1e-12));
  CHECK(pass.metric("continuum_threshold") == doctest::Approx(1.0 / (4 * pi * pi)));
  CHECK_FALSE(check_large_L(params(0.01), g).pass);

  // finite differences: discrete constant sits slightly above pi^-1
  const CriterionReport dn = check_large_L(params(0.2), Grid(32, 32, BcMode::dirichlet_neumann));
  CHECK(dn.pass);
  CHECK(dn.metric("continuum_c_omega") == doctest::Approx(1.0 / pi));
  CHECK(dn.metric("c_omega") >= 1.0 / pi);
  CHECK(dn.metric("c_omega") == doctest::Approx(1.0 / pi).epsilon(1e-3));
  CHECK_THROWS(pass.metric("nope"));
}

TEST_CASE("large L forbids non-constant equilibria") {
  const Grid g(16, 16, BcMode::periodic);
  for (double L : {0.05, 0.3, 1.0}) {
    REQUIRE(check_large_L(params(L), g).pass);
    const Model m(g, params(L));
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      InitSpec s;
      s.kind = InitKind::random;
      s.seed = seed;
      StationaryOptions opt;
      opt.compute_kernel = false;
      const StationaryReport r = solve_stationary(m, make_director(g, s), opt);
      CHECK(r.converged);
      CHECK(r.classification != Classification::other);
    }
  }
}

TEST_CASE("check_small_energy") {
  const Grid g(16, 16, BcMode::periodic);
  SUBCASE("hypothesis holds for the quadratic families") {
    for (auto fam : {PotentialFamily::ginzburg_landau, PotentialFamily::capped_gl}) {
      const Model m(g, params(1.0, fam));
      const State s0 = m.make_state(constant(g, 1.0, 0.0), VectorField(g, FieldRole::velocity));
      const CriterionReport r = check_small_energy(m, s0, 0.5, 2.0, 1e-2);
      CHECK(r.metric("hypothesis_holds") == 1.0);
      CHECK(r.metric("hypothesis_worst_violation") <= 1e-12);
      CHECK(r.metric("EE0") == 0.0);
      CHECK(r.metric("bound") == 0.0);
      CHECK(r.pass);
    }
  }
  SUBCASE("a too-large kappa violates the hypothesis") {
    const Model m(g, params());
    const State s0 = m.make_state(constant(g, 1.0, 0.0), VectorField(g, FieldRole::velocity));
    const CriterionReport r = check_small_energy(m, s0, 0.8, 2.0, 1e-2);
    CHECK(r.metric("hypothesis_holds") == 0.0);
    CHECK_FALSE(r.pass);
  }
  SUBCASE("bound is (2 EE0 / kappa)^(1/sigma)") {
    const Model m(g, params());
    const VectorField u = testing::vector_field(
        g, FieldRole::velocity, [](double, double y) { return 0.01 * std::sin(2 * pi * y); },
        [](double, double) { return 0.0; });
    const State s0 = m.make_state(constant(g, 1.0, 0.0), u);
    const CriterionReport r = check_small_energy(m, s0, 0.5, 2.0, 0.1);
    CHECK(r.metric("EE0") == doctest::Approx(0.25e-4));
    CHECK(r.metric("bound") == doctest::Approx(std::sqrt(1e-4)));
    CHECK(r.pass);
    CHECK_FALSE(check_small_energy(m, s0, 0.5, 2.0, 1e-3).pass);
  }
  SUBCASE("preconditions") {
    ModelParams p = params();
    p.delta = 1.0;
    const Model stretched(g, p);
    const State s0 = stretched.make_state(constant(g, 1.0, 0.0), VectorField(g, FieldRole::velocity));
    CHECK_THROWS_AS(check_small_energy(stretched, s0, 0.5, 2.0, 1e-2), std::invalid_argument);
    const Model m(g, params());
    const State big = m.make_state(constant(g, 1.5, 0.0), VectorField(g, FieldRole::velocity));
    CHECK_THROWS_AS(check_small_energy(m, big, 0.5, 2.0, 1e-2), std::invalid_argument);
    CHECK_THROWS_AS(check_small_energy(m, s0, 0.0, 2.0, 1e-2), std::invalid_argument);
    CHECK_THROWS_AS(check_small_energy(m, s0, 0.5, 0.5, 1e-2), std::invalid_argument);
  }
}
