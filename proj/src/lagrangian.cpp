#include "dvi/lagrangian.hpp"

#include <algorithm>
#include <cmath>

#include "newton.hpp"

namespace dvi {

using detail::inf_norm;

void StepperConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("step size h must be positive and finite");
  if (!(newton_tol > 0.0)) throw InputError("Newton tolerance must be positive");
  if (newton_max_iter < 1) throw InputError("Newton iteration limit must be at least 1");
}

Mat two_form(const DegenerateLagrangianSystem& sys, const Vec& q) {
  const Mat D = sys.d_alpha(q);
  return D.transpose() - D;
}

Vec vector_field(const DegenerateLagrangianSystem& sys, const Vec& q) {
  Eigen::FullPivLU<Mat> lu(two_form(sys, q));
  if (!lu.isInvertible()) throw SolverError("two-form is singular at the evaluation point of " + sys.name);
  return lu.solve(sys.grad_h(q));
}

VectorField make_vector_field(const DegenerateLagrangianSystem& sys) {
  return [sys](const Vec& q) { return vector_field(sys, q); };
}

double discrete_lagrangian(const DegenerateLagrangianSystem& sys, const Vec& q_a, const Vec& q_b, double h) {
  const Vec velocity = (q_b - q_a) / h;
  const double la = sys.alpha(q_a).dot(velocity) - sys.hamiltonian(q_a);
  const double lb = sys.alpha(q_b).dot(velocity) - sys.hamiltonian(q_b);
  return 0.5 * h * (la + lb);
}

Vec d1_discrete_lagrangian(const DegenerateLagrangianSystem& sys, const Vec& q_a, const Vec& q_b, double h) {
  return 0.5 * (sys.d_alpha(q_a).transpose() * (q_b - q_a) - sys.alpha(q_a) - sys.alpha(q_b)) -
         0.5 * h * sys.grad_h(q_a);
}

Vec d2_discrete_lagrangian(const DegenerateLagrangianSystem& sys, const Vec& q_a, const Vec& q_b, double h) {
  return 0.5 * (sys.d_alpha(q_b).transpose() * (q_b - q_a) + sys.alpha(q_b) + sys.alpha(q_a)) -
         0.5 * h * sys.grad_h(q_b);
}

Vec del_residual(const DegenerateLagrangianSystem& sys, const Vec& q_prev, const Vec& q_curr, const Vec& q_next,
                 double h) {
  return sys.d_alpha(q_curr).transpose() * (q_next - q_prev) - sys.alpha(q_next) + sys.alpha(q_prev) -
         2.0 * h * sys.grad_h(q_curr);
}

Vec del_step(const DegenerateLagrangianSystem& sys, const Vec& q_prev, const Vec& q_curr, const StepperConfig& cfg,
             NewtonReport* report) {
  cfg.validate();
  return del_step(sys, q_prev, q_curr, cfg, Vec(q_prev + 2.0 * cfg.h * vector_field(sys, q_curr)), report);
}

Vec del_step(const DegenerateLagrangianSystem& sys, const Vec& q_prev, const Vec& q_curr, const StepperConfig& cfg,
             const Vec& initial_guess, NewtonReport* report) {
  cfg.validate();
  if (!q_prev.allFinite() || !q_curr.allFinite()) throw SolverError("non-finite state passed to del_step");

  // Terms that do not depend on q_{m+1}.
  const Mat DaT = sys.d_alpha(q_curr).transpose();
  const Vec alpha_prev = sys.alpha(q_prev);
  const Vec force = 2.0 * cfg.h * sys.grad_h(q_curr);

  auto residual = [&](const Vec& x) {
    const Vec lhs = DaT * (x - q_prev);
    const Vec alpha_next = sys.alpha(x);
    detail::Residual F{lhs - alpha_next + alpha_prev - force, 0.0};
    F.scale = std::max({inf_norm(lhs), inf_norm(alpha_next), inf_norm(alpha_prev), inf_norm(force)});
    return F;
  };
  auto jacobian = [&](const Vec& x) -> Mat { return DaT - sys.d_alpha(x); };

  auto result = detail::newton_solve(residual, jacobian, initial_guess, cfg.newton_tol, cfg.newton_max_iter,
                                     "discrete Euler-Lagrange step");
  if (report) *report = {result.iterations, result.residual};
  return std::move(result.x);
}

Vec starting_value(const DegenerateLagrangianSystem& sys, const Vec& q0, const StepperConfig& cfg,
                   NewtonReport* report) {
  cfg.validate();
  if (!q0.allFinite()) throw SolverError("non-finite initial value");
  const double h = cfg.h;
  const Vec momentum = sys.alpha(q0);
  const Mat D0T = sys.d_alpha(q0).transpose();
  const Vec half_force = 0.5 * h * sys.grad_h(q0);

  // D2 L_d(x, q0) - alpha(q0) = 1/2 [D alpha(q0)^T (q0 - x) + alpha(x) - alpha(q0)] - h/2 grad H(q0)
  auto residual = [&](const Vec& x) {
    const Vec lhs = 0.5 * (D0T * (q0 - x));
    const Vec alpha_x = sys.alpha(x);
    detail::Residual F{lhs + 0.5 * (alpha_x - momentum) - half_force, 0.0};
    F.scale = std::max({inf_norm(lhs), 0.5 * inf_norm(alpha_x), 0.5 * inf_norm(momentum), inf_norm(half_force)});
    return F;
  };
  auto jacobian = [&](const Vec& x) -> Mat { return 0.5 * (sys.d_alpha(x) - D0T); };

  auto result = detail::newton_solve(residual, jacobian, Vec(q0 - h * vector_field(sys, q0)), cfg.newton_tol,
                                     cfg.newton_max_iter, "starting value");
  if (report) *report = {result.iterations, result.residual};
  return std::move(result.x);
}

Trajectory multistep_run(const DegenerateLagrangianSystem& sys, const Vec& q0, const StepperConfig& cfg, long n) {
  if (n < 0) throw InputError("step count must be non-negative");
  cfg.validate();
  Trajectory traj;
  traj.meta.system = sys.name;
  traj.meta.h = cfg.h;
  traj.meta.steps = n;
  traj.meta.engine = "direct";
  traj.rows.reserve(n + 1);

  const double reference = sys.hamiltonian(q0);
  traj.append(0, cfg.h, q0, sys.hamiltonian, reference);

  Vec q_prev;
  try {
    q_prev = starting_value(sys, q0, cfg);
  } catch (const SolverError& e) {
    throw SolverError(e.what(), 0);
  }
  Vec q_curr = q0;
  for (long m = 1; m <= n; ++m) {
    NewtonReport rep;
    Vec q_next;
    try {
      q_next = del_step(sys, q_prev, q_curr, cfg, &rep);
    } catch (const SolverError& e) {
      throw SolverError(e.what(), m);
    }
    traj.stats.newton_iterations += rep.iterations;
    traj.stats.max_newton_iterations = std::max(traj.stats.max_newton_iterations, rep.iterations);
    traj.append(m, cfg.h, q_next, sys.hamiltonian, reference);
    q_prev = std::move(q_curr);
    q_curr = std::move(q_next);
  }
  return traj;
}

Tableau leapfrog_tableau() {
  Mat A = Mat::Zero(1, 1);
  Mat U(1, 4);
  U << 0, 1, 2, 0;
  Mat B(4, 1);
  B << 0, 0, 1, 1;
  Mat V(4, 4);
  V << 0, 1, 2, 0,
       1, 0, 0, 0,
       0, 0, 0, 0,
       0, 0, 1, 0;
  return Tableau::make(std::move(A), std::move(U), std::move(B), std::move(V), "leapfrog");
}

GlmState pack_inputs(const DegenerateLagrangianSystem& sys, const Vec& q_curr, const Vec& q_prev, double h) {
  const Vec hf_curr = h * vector_field(sys, q_curr);
  const Vec hf_prev = h * vector_field(sys, q_prev);
  GlmState state;
  state.h = h;
  state.components = {q_curr, q_prev, hf_curr, hf_curr + hf_prev};
  return state;
}

Trajectory glm_run(const Tableau& tab, const DegenerateLagrangianSystem& sys, const GlmState& state0, long n,
                   const StageSolverOptions& opts) {
  Trajectory traj = glm_run(tab, make_vector_field(sys), state0, n, sys.hamiltonian, opts);
  traj.meta.system = sys.name;
  return traj;
}

}  // namespace dvi
