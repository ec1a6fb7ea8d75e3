#pragma once

#include <string>

#include "dvi/glm.hpp"
#include "dvi/trajectory.hpp"
#include "dvi/types.hpp"

namespace dvi {

// L(q, qdot) = <alpha(q), qdot> - H(q). d_alpha(q)(i, j) = d alpha_i / d q_j.
// All callables must be reentrant.
struct DegenerateLagrangianSystem {
  std::string name;
  int dim = 0;
  VectorField alpha;
  MatrixField d_alpha;
  ScalarField hamiltonian;
  VectorField grad_h;
};

struct StepperConfig {
  double h = 0.1;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;

  void validate() const;
};

// Continuous Euler-Lagrange field: solves omega(q) f = grad H(q) with
// omega = D alpha^T - D alpha. Throws SolverError when omega(q) is singular.
Vec vector_field(const DegenerateLagrangianSystem& sys, const Vec& q);
VectorField make_vector_field(const DegenerateLagrangianSystem& sys);

// Two-form matrix omega(q) = D alpha(q)^T - D alpha(q).
Mat two_form(const DegenerateLagrangianSystem& sys, const Vec& q);

// Trapezoidal discrete Lagrangian
//   L_d(a, b) = h/2 [L(a, (b-a)/h) + L(b, (b-a)/h)]
// and its exact partial derivatives in the first and second slot.
double discrete_lagrangian(const DegenerateLagrangianSystem& sys, const Vec& q_a, const Vec& q_b, double h);
Vec d1_discrete_lagrangian(const DegenerateLagrangianSystem& sys, const Vec& q_a, const Vec& q_b, double h);
Vec d2_discrete_lagrangian(const DegenerateLagrangianSystem& sys, const Vec& q_a, const Vec& q_b, double h);

// Residual of the two-step scheme
//   D alpha(q_m)^T (q_{m+1} - q_{m-1}) - alpha(q_{m+1}) + alpha(q_{m-1}) - 2h grad H(q_m),
// which is twice D1 L_d(q_m, q_{m+1}) + D2 L_d(q_{m-1}, q_m).
Vec del_residual(const DegenerateLagrangianSystem& sys, const Vec& q_prev, const Vec& q_curr, const Vec& q_next,
                 double h);

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;
};

// q_{m+1} from (q_{m-1}, q_m) by Newton iteration on del_residual, starting
// from q_{m-1} + 2h f(q_m) unless an initial guess is supplied.
Vec del_step(const DegenerateLagrangianSystem& sys, const Vec& q_prev, const Vec& q_curr, const StepperConfig& cfg,
             NewtonReport* report = nullptr);
Vec del_step(const DegenerateLagrangianSystem& sys, const Vec& q_prev, const Vec& q_curr, const StepperConfig& cfg,
             const Vec& initial_guess, NewtonReport* report = nullptr);

// q_{-1} solving alpha(q_0) = D2 L_d(q_{-1}, q_0), i.e. the discrete momentum
// at q_0 matches the continuous one. Newton from q_0 - h f(q_0).
Vec starting_value(const DegenerateLagrangianSystem& sys, const Vec& q0, const StepperConfig& cfg,
                   NewtonReport* report = nullptr);

// starting_value followed by n applications of del_step.
Trajectory multistep_run(const DegenerateLagrangianSystem& sys, const Vec& q0, const StepperConfig& cfg, long n);

// The two-step scheme for linear alpha, y_{m+1} = y_{m-1} + 2 h f(y_m), as a
// one-stage, four-input GLM with inputs (q_m, q_{m-1}, h f(q_m),
// h f(q_m) + h f(q_{m-1})). The fourth input is never read.
Tableau leapfrog_tableau();
GlmState pack_inputs(const DegenerateLagrangianSystem& sys, const Vec& q_curr, const Vec& q_prev, double h);

// glm_run with the system's vector field, recording H along the first component.
Trajectory glm_run(const Tableau& tab, const DegenerateLagrangianSystem& sys, const GlmState& state0, long n,
                   const StageSolverOptions& opts = {});

}  // namespace dvi
