#include <cmath>
#include <random>

#include "doctest.h"

#include "dvi/lagrangian.hpp"
#include "dvi/parasitism.hpp"
#include "dvi/systems.hpp"
#include "support/oracles.hpp"

using namespace dvi;
using dvi::test::central_gradient;
using dvi::test::central_jacobian;
using dvi::test::random_point;
using dvi::test::relative_error;

namespace {

std::vector<DegenerateLagrangianSystem> test_systems() {
  return {pendulum(), test::nonlinear_test_system(), test::linear_alpha_system(), henon_heiles()};
}

// The degenerate discrete Euler-Lagrange equation exactly as printed:
// D alpha^T(q_m)(q_{m+1} - q_{m-1}) = alpha(q_{m+1}) - alpha(q_{m-1}) + 2h grad H(q_m).
Vec printed_scheme_residual(const DegenerateLagrangianSystem& sys, const Vec& a, const Vec& b, const Vec& c,
                            double h) {
  const Vec lhs = sys.d_alpha(b).transpose() * (c - a);
  const Vec rhs = sys.alpha(c) - sys.alpha(a) + 2.0 * h * sys.grad_h(b);
  return lhs - rhs;
}

}  // namespace

TEST_CASE("vector field") {
  const auto pend = pendulum();
  CHECK((vector_field(pend, Vec{{0.5, 0.2}}) - Vec{{0.2, -std::sin(0.5)}}).norm() <= 1e-15);
  CHECK(vector_field(pend, Vec{{0.0, 0.0}}).norm() == 0.0);
  CHECK((vector_field(harmonic_oscillator(), Vec{{1.0, 0.0}}) - Vec{{0.0, -1.0}}).norm() <= 1e-15);

  DegenerateLagrangianSystem flat = pend;
  flat.alpha = [](const Vec&) { return Vec::Zero(2); };
  flat.d_alpha = [](const Vec&) { return Mat::Zero(2, 2); };
  CHECK_THROWS_AS(vector_field(flat, Vec{{0.1, 0.2}}), SolverError);
}

TEST_CASE("system derivatives agree with finite differences") {
  std::mt19937_64 rng(1);
  for (const auto& sys : test_systems()) {
    for (int i = 0; i < 100; ++i) {
      const Vec q = random_point(rng, sys.dim);
      CHECK(relative_error(sys.d_alpha(q), central_jacobian(sys.alpha, q)) <= 1e-5);
      CHECK(relative_error(sys.grad_h(q), central_gradient(sys.hamiltonian, q)) <= 1e-5);
    }
  }
}

TEST_CASE("trapezoidal discrete Lagrangian") {
  const auto pend = pendulum();
  for (double h : {0.01, 0.1, 0.7}) {
    CHECK(discrete_lagrangian(pend, Vec::Zero(2), Vec::Zero(2), h) == doctest::Approx(h).epsilon(1e-15));
  }
  // alpha . dq vanishes (q^(2) = 0 at both ends): h/2 (cos 0 + cos 0.1).
  CHECK(discrete_lagrangian(pend, Vec{{0.0, 0.0}}, Vec{{0.1, 0.0}}, 0.1) ==
        doctest::Approx(0.05 * (1.0 + std::cos(0.1))).epsilon(1e-15));
  CHECK(discrete_lagrangian(pend, Vec{{0.0, 0.0}}, Vec{{0.1, 0.0}}, 0.1) == doctest::Approx(0.09975).epsilon(1e-4));

  // Constant path: L_d / h = L(q, 0) = -H(q).
  std::mt19937_64 rng(2);
  for (const auto& sys : test_systems()) {
    const Vec q = random_point(rng, sys.dim);
    CHECK(discrete_lagrangian(sys, q, q, 1e-3) / 1e-3 == doctest::Approx(-sys.hamiltonian(q)).epsilon(1e-12));
  }
}

TEST_CASE("slot derivatives of the pendulum discrete Lagrangian in closed form") {
  const auto pend = pendulum();
  const Vec a{{0.3, -0.4}};
  const Vec b{{0.45, 0.2}};
  const double h = 0.1;
  const Vec d2 = d2_discrete_lagrangian(pend, a, b, h);
  CHECK(d2[0] == doctest::Approx((b[1] + a[1]) / 2.0 - h / 2.0 * std::sin(b[0])).epsilon(1e-15));
  CHECK(d2[1] == doctest::Approx((b[0] - a[0]) / 2.0 - h / 2.0 * b[1]).epsilon(1e-15));
  const Vec d1 = d1_discrete_lagrangian(pend, a, b, h);
  CHECK(d1[0] == doctest::Approx(-(a[1] + b[1]) / 2.0 - h / 2.0 * std::sin(a[0])).epsilon(1e-15));
  CHECK(d1[1] == doctest::Approx((b[0] - a[0]) / 2.0 - h / 2.0 * a[1]).epsilon(1e-15));
}

TEST_CASE("slot derivatives match finite differences of the discrete Lagrangian") {
  std::mt19937_64 rng(3);
  for (const auto& sys : test_systems()) {
    for (int i = 0; i < 100; ++i) {
      const Vec a = random_point(rng, sys.dim);
      const Vec b = a + 0.2 * random_point(rng, sys.dim, -1.0, 1.0);
      const double h = 0.05 + 0.1 * (i % 5);
      const Vec fd1 = central_gradient([&](const Vec& x) { return discrete_lagrangian(sys, x, b, h); }, a);
      const Vec fd2 = central_gradient([&](const Vec& x) { return discrete_lagrangian(sys, a, x, h); }, b);
      CHECK((d1_discrete_lagrangian(sys, a, b, h) - fd1).lpNorm<Eigen::Infinity>() <= 1e-6);
      CHECK((d2_discrete_lagrangian(sys, a, b, h) - fd2).lpNorm<Eigen::Infinity>() <= 1e-6);
    }
  }
}

TEST_CASE("discrete Euler-Lagrange sum is half the printed two-step residual") {
  std::mt19937_64 rng(4);
  for (const auto& sys : test_systems()) {
    for (int i = 0; i < 100; ++i) {
      const Vec a = random_point(rng, sys.dim);
      const Vec b = random_point(rng, sys.dim);
      const Vec c = random_point(rng, sys.dim);
      const double h = 0.1;
      const Vec sum = d1_discrete_lagrangian(sys, b, c, h) + d2_discrete_lagrangian(sys, a, b, h);
      CHECK((2.0 * sum - printed_scheme_residual(sys, a, b, c, h)).lpNorm<Eigen::Infinity>() <= 1e-12);
      CHECK((del_residual(sys, a, b, c, h) - printed_scheme_residual(sys, a, b, c, h)).lpNorm<Eigen::Infinity>() <=
            1e-12);
    }
  }
}

TEST_CASE("del_step on the pendulum is the explicit two-step recursion") {
  const auto pend = pendulum();
  const StepperConfig cfg{0.1};

  const Vec top{{M_PI, 0.0}};
  CHECK((del_step(pend, top, top, cfg) - top).norm() <= 1e-15);

  const Vec q_prev{{2.3, 0.1 * std::sin(2.3)}};
  const Vec q_curr{{2.3, 0.0}};
  const Vec expected{{2.3, q_prev[1] - 0.2 * std::sin(2.3)}};
  NewtonReport rep;
  const Vec next = del_step(pend, q_prev, q_curr, cfg, &rep);
  CHECK((next - expected).norm() <= 1e-15);
  CHECK(next[1] == doctest::Approx(-0.07457).epsilon(1e-4));
  CHECK(rep.iterations == 0);
}

TEST_CASE("linear alpha: predictor is exact and any guess converges in one iteration") {
  std::mt19937_64 rng(5);
  const StepperConfig cfg{0.05};
  for (const auto& sys : {pendulum(), test::linear_alpha_system(), henon_heiles()}) {
    for (int i = 0; i < 20; ++i) {
      const Vec a = random_point(rng, sys.dim);
      const Vec b = random_point(rng, sys.dim);
      NewtonReport rep;
      del_step(sys, a, b, cfg, &rep);
      CHECK(rep.iterations <= 1);
      const Vec guess = random_point(rng, sys.dim, -10.0, 10.0);
      const Vec next = del_step(sys, a, b, cfg, guess, &rep);
      CHECK(rep.iterations == 1);
      CHECK(del_residual(sys, a, b, next, cfg.h).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
  }
}

TEST_CASE("nonlinear alpha: Newton steps satisfy the discrete Euler-Lagrange equations") {
  const auto sys = test::nonlinear_test_system();
  const StepperConfig cfg{0.05};
  const Vec q0{{0.6, -0.3}};
  NewtonReport rep;
  Vec q_prev = starting_value(sys, q0, cfg, &rep);
  CHECK(rep.iterations >= 1);
  Vec q_curr = q0;
  int total = 0;
  for (int m = 0; m < 200; ++m) {
    const Vec q_next = del_step(sys, q_prev, q_curr, cfg, &rep);
    total += rep.iterations;
    const Vec el = d1_discrete_lagrangian(sys, q_curr, q_next, cfg.h) + d2_discrete_lagrangian(sys, q_prev, q_curr, cfg.h);
    CHECK(el.norm() <= 1e-10);
    q_prev = q_curr;
    q_curr = q_next;
  }
  CHECK(total > 0);
}

TEST_CASE("del_step failures") {
  const auto sys = test::nonlinear_test_system();
  StepperConfig cfg{0.05};
  cfg.newton_max_iter = 1;
  CHECK_THROWS_AS(del_step(sys, Vec{{0.6, -0.3}}, Vec{{0.61, -0.29}}, cfg, Vec{{40.0, -30.0}}), SolverError);

  DegenerateLagrangianSystem flat = pendulum();
  flat.alpha = [](const Vec&) { return Vec::Zero(2); };
  flat.d_alpha = [](const Vec&) { return Mat::Zero(2, 2); };
  CHECK_THROWS_AS(del_step(flat, Vec{{0.1, 0.0}}, Vec{{0.2, 0.0}}, StepperConfig{0.1}, Vec{{0.3, 0.0}}),
                  SolverError);
  CHECK_THROWS_AS(del_step(pendulum(), Vec{{0.1, 0.0}}, Vec{{0.2, 0.0}}, StepperConfig{-0.1}), InputError);
}

TEST_CASE("time reversibility of the pendulum recursion") {
  const auto pend = pendulum();
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    const Vec a = random_point(rng, 2);
    const Vec b = a + 0.1 * random_point(rng, 2, -1.0, 1.0);
    const Vec c = del_step(pend, a, b, StepperConfig{0.1});
    // The h -> -h map from (q_{m+1}, q_m): q_{m-1} = q_{m+1} - 2h f(q_m).
    const Vec back = c + 2.0 * -0.1 * vector_field(pend, b);
    CHECK((back - a).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("starting value") {
  const auto pend = pendulum();
  const StepperConfig cfg{0.1};
  const Vec q0{{2.3, 0.0}};
  const Vec qm1 = starting_value(pend, q0, cfg);
  // q_{-1}^(1) = q_0^(1) - h q_0^(2), q_{-1}^(2) = q_0^(2) + h sin q_0^(1).
  CHECK(std::abs(qm1[0] - 2.3) <= 1e-10);
  CHECK(std::abs(qm1[1] - 0.1 * std::sin(2.3)) <= 1e-10);
  CHECK(qm1[1] == doctest::Approx(0.074571).epsilon(1e-5));
  CHECK((d2_discrete_lagrangian(pend, qm1, q0, cfg.h) - pend.alpha(q0)).norm() <= 1e-10);
  CHECK(starting_value(pend, Vec::Zero(2), cfg).norm() == 0.0);

  std::mt19937_64 rng(7);
  for (const auto& sys : test_systems()) {
    for (int i = 0; i < 20; ++i) {
      const Vec q = random_point(rng, sys.dim, -1.0, 1.0);
      const Vec prev = starting_value(sys, q, cfg);
      CHECK((d2_discrete_lagrangian(sys, prev, q, cfg.h) - sys.alpha(q)).norm() <= 1e-10);
    }
  }
}

TEST_CASE("leapfrog GLM packaging") {
  const auto pend = pendulum();
  const double h = 0.1;
  const Vec q0{{2.3, 0.0}};
  const Vec qm1 = starting_value(pend, q0, StepperConfig{h});
  const GlmState s0 = pack_inputs(pend, q0, qm1, h);
  REQUIRE(s0.components.size() == 4);
  CHECK(s0.components[0] == q0);
  CHECK(s0.components[1] == qm1);
  CHECK(s0.components[2] == h * vector_field(pend, q0));
  CHECK(s0.components[3] == h * vector_field(pend, q0) + h * vector_field(pend, qm1));

  const VectorField f = make_vector_field(pend);
  const GlmState s1 = glm_step(leapfrog_tableau(), f, s0);
  CHECK((s1.components[0] - (qm1 + 2.0 * h * vector_field(pend, q0))).norm() <= 1e-15);

  SUBCASE("fourth input is never read") {
    GlmState zeroed = s0;
    zeroed.components[3].setZero();
    const GlmState z1 = glm_step(leapfrog_tableau(), f, zeroed);
    for (int i = 0; i < 4; ++i) CHECK(z1.components[i] == s1.components[i]);
  }
  SUBCASE("growth parameter") {
    const auto report = parasitic_growth_parameters(leapfrog_tableau());
    REQUIRE(report.growth_parameters.size() == 1);
    CHECK(std::abs(report.growth_parameters[0].mu - Complex(-5.0 / 3.0)) <= 1e-12);
  }
}

TEST_CASE("multistep_run") {
  const auto pend = pendulum();
  const StepperConfig cfg{0.1};
  const Vec q0{{2.3, 0.0}};

  SUBCASE("n = 0") {
    const Trajectory t = multistep_run(pend, q0, cfg, 0);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].t == 0.0);
    CHECK(t.rows[0].abs_energy_error == 0.0);
  }
  SUBCASE("ten steps agree with the GLM engine point for point") {
    const Trajectory direct = multistep_run(pend, q0, cfg, 10);
    const Trajectory glm =
        glm_run(leapfrog_tableau(), pend, pack_inputs(pend, q0, starting_value(pend, q0, cfg), cfg.h), 10);
    REQUIRE(direct.rows.size() == glm.rows.size());
    for (std::size_t m = 0; m < direct.rows.size(); ++m) {
      CHECK(direct.rows[m].t == glm.rows[m].t);
      CHECK((direct.rows[m].q - glm.rows[m].q).lpNorm<Eigen::Infinity>() <= 1e-10);
    }
  }
  SUBCASE("energy bookkeeping") {
    const Trajectory t = multistep_run(pend, q0, cfg, 50);
    for (std::size_t m = 0; m < t.rows.size(); ++m) {
      CHECK(t.rows[m].t == static_cast<double>(m) * 0.1);
      CHECK(t.rows[m].abs_energy_error == std::abs(pend.hamiltonian(t.rows[m].q) - pend.hamiltonian(q0)));
    }
  }
  SUBCASE("failure reports the step index") {
    const auto sys = test::nonlinear_test_system();
    StepperConfig tight{0.05};
    tight.newton_max_iter = 1;
    tight.newton_tol = 1e-300;
    try {
      multistep_run(sys, Vec{{0.6, -0.3}}, tight, 5);
      FAIL("expected a solver failure");
    } catch (const SolverError& e) {
      CHECK(e.step().has_value());
    }
  }
}

TEST_CASE("second-order convergence on the pendulum") {
  const auto pend = pendulum();
  const Vec q0{{2.3, 0.0}};
  const VectorField f = make_vector_field(pend);
  std::vector<double> errors;
  for (double h : {0.1, 0.05, 0.025}) {
    const long n = std::lround(1.0 / h);
    const Trajectory t = multistep_run(pend, q0, StepperConfig{h}, n);
    const Vec ref = test::rk4(f, q0, h / 100.0, n * 100);
    errors.push_back((t.rows.back().q - ref).lpNorm<Eigen::Infinity>());
  }
  CHECK(errors[0] / errors[1] == doctest::Approx(4.0).epsilon(0.1));
  CHECK(errors[1] / errors[2] == doctest::Approx(4.0).epsilon(0.1));
}
