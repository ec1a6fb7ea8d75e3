#include "dvi/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dvi {

namespace {

void require_finite(const Mat& m, const char* name) {
  if (!m.allFinite()) {
    throw InputError(std::string("tableau matrix ") + name + " has a non-finite entry");
  }
}

std::string shape(const Mat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

Vec evaluate(const VectorField& f, const Vec& y, StepStats& stats) {
  Vec value = f(y);
  ++stats.function_evaluations;
  if (value.size() != y.size()) {
    throw SolverError("vector field returned " + std::to_string(value.size()) +
                      " components for a state of dimension " + std::to_string(y.size()));
  }
  if (!value.allFinite()) {
    throw SolverError("vector field returned a non-finite value");
  }
  return value;
}

Mat jacobian(const VectorField& f, const Vec& y, const Vec& fy, const StageSolverOptions& opts,
             StepStats& stats) {
  if (opts.jacobian) {
    return opts.jacobian(y);
  }
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  const auto n = y.size();
  Mat J(n, n);
  Vec shifted = y;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double delta = sqrt_eps * (1.0 + std::abs(y[j]));
    shifted[j] = y[j] + delta;
    J.col(j) = (evaluate(f, shifted, stats) - fy) / delta;
    shifted[j] = y[j];
  }
  return J;
}

double inf_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

// Solves k = rhs + c f(k) for a single stage block.
Vec solve_diagonal_stage(const VectorField& f, const Vec& rhs, double c, const StageSolverOptions& opts,
                         StepStats& stats) {
  const auto n = rhs.size();
  Vec k = rhs;
  for (int it = 0;; ++it) {
    const Vec fk = evaluate(f, k, stats);
    const Vec residual = k - rhs - c * fk;
    const double scale = std::max({inf_norm(k), inf_norm(rhs), std::abs(c) * inf_norm(fk)});
    if (inf_norm(residual) <= opts.tol * scale || inf_norm(residual) == 0.0) {
      return k;
    }
    if (it == opts.max_iter) {
      throw SolverError("stage Newton iteration did not converge in " + std::to_string(opts.max_iter) +
                        " iterations (residual " + std::to_string(inf_norm(residual)) + ")");
    }
    const Mat J = Mat::Identity(n, n) - c * jacobian(f, k, fk, opts, stats);
    Eigen::FullPivLU<Mat> lu(J);
    if (!lu.isInvertible()) {
      throw SolverError("singular stage Newton matrix");
    }
    k -= lu.solve(residual);
    ++stats.newton_iterations;
  }
}

// Fully coupled Newton iteration on all s stages at once.
std::vector<Vec> solve_coupled_stages(const Tableau& tab, const VectorField& f, const std::vector<Vec>& Uy,
                                      double h, const StageSolverOptions& opts, StepStats& stats) {
  const int s = tab.stages();
  const auto n = Uy.front().size();
  std::vector<Vec> K = Uy;
  std::vector<Vec> F(s);
  for (int it = 0;; ++it) {
    for (int i = 0; i < s; ++i) F[i] = evaluate(f, K[i], stats);
    Vec residual(s * n);
    double scale = 0.0;
    for (int i = 0; i < s; ++i) {
      Vec hAf = Vec::Zero(n);
      for (int j = 0; j < s; ++j) hAf += h * tab.A()(i, j) * F[j];
      residual.segment(i * n, n) = K[i] - Uy[i] - hAf;
      scale = std::max({scale, inf_norm(K[i]), inf_norm(Uy[i]), inf_norm(hAf)});
    }
    if (inf_norm(residual) <= opts.tol * scale || inf_norm(residual) == 0.0) {
      return K;
    }
    if (it == opts.max_iter) {
      throw SolverError("stage Newton iteration did not converge in " + std::to_string(opts.max_iter) +
                        " iterations (residual " + std::to_string(inf_norm(residual)) + ")");
    }
    Mat J = Mat::Identity(s * n, s * n);
    for (int j = 0; j < s; ++j) {
      const Mat Df = jacobian(f, K[j], F[j], opts, stats);
      for (int i = 0; i < s; ++i) J.block(i * n, j * n, n, n) -= h * tab.A()(i, j) * Df;
    }
    Eigen::FullPivLU<Mat> lu(J);
    if (!lu.isInvertible()) {
      throw SolverError("singular stage Newton matrix");
    }
    const Vec delta = lu.solve(residual);
    for (int i = 0; i < s; ++i) K[i] -= delta.segment(i * n, n);
    ++stats.newton_iterations;
  }
}

}  // namespace

Tableau Tableau::make(Mat A, Mat U, Mat B, Mat V, std::string id) {
  const auto s = A.rows();
  const auto r = V.rows();
  if (s < 1 || A.cols() != s) throw InputError("A must be a non-empty square matrix, got " + shape(A));
  if (r < 1 || V.cols() != r) throw InputError("V must be a non-empty square matrix, got " + shape(V));
  if (U.rows() != s || U.cols() != r) {
    throw InputError("U must be " + std::to_string(s) + "x" + std::to_string(r) + ", got " + shape(U));
  }
  if (B.rows() != r || B.cols() != s) {
    throw InputError("B must be " + std::to_string(r) + "x" + std::to_string(s) + ", got " + shape(B));
  }
  require_finite(A, "A");
  require_finite(U, "U");
  require_finite(B, "B");
  require_finite(V, "V");
  return Tableau(std::move(A), std::move(U), std::move(B), std::move(V), std::move(id));
}

bool Tableau::is_explicit() const {
  for (int i = 0; i < stages(); ++i)
    for (int j = i; j < stages(); ++j)
      if (A_(i, j) != 0.0) return false;
  return true;
}

bool Tableau::is_diagonally_implicit() const {
  for (int i = 0; i < stages(); ++i)
    for (int j = i + 1; j < stages(); ++j)
      if (A_(i, j) != 0.0) return false;
  return true;
}

void validate_state(const Tableau& tab, const GlmState& state) {
  if (static_cast<int>(state.components.size()) != tab.inputs()) {
    throw InputError("state has " + std::to_string(state.components.size()) + " components, tableau expects " +
                     std::to_string(tab.inputs()));
  }
  const auto n = state.components.front().size();
  for (const auto& c : state.components) {
    if (c.size() != n) throw InputError("state components have differing dimensions");
  }
  if (!(state.h > 0.0)) throw InputError("step size must be positive");
}

GlmState glm_step(const Tableau& tab, const VectorField& f, const GlmState& state, const StageSolverOptions& opts,
                  StepStats* stats) {
  validate_state(tab, state);
  StepStats local;
  StepStats& st = stats ? *stats : local;

  const int s = tab.stages();
  const int r = tab.inputs();
  const double h = state.h;
  const auto n = state.components.front().size();
  const auto& y = state.components;

  std::vector<Vec> Uy(s, Vec::Zero(n));
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < r; ++j) Uy[i] += tab.U()(i, j) * y[j];

  std::vector<Vec> K(s);
  std::vector<Vec> F(s);
  if (tab.is_diagonally_implicit()) {
    // Forward sweep; stages with a nonzero diagonal entry get their own Newton solve.
    for (int i = 0; i < s; ++i) {
      Vec rhs = Uy[i];
      for (int j = 0; j < i; ++j) rhs += h * tab.A()(i, j) * F[j];
      const double diag = tab.A()(i, i);
      K[i] = diag == 0.0 ? std::move(rhs) : solve_diagonal_stage(f, rhs, h * diag, opts, st);
      F[i] = evaluate(f, K[i], st);
    }
  } else {
    K = solve_coupled_stages(tab, f, Uy, h, opts, st);
    for (int i = 0; i < s; ++i) F[i] = evaluate(f, K[i], st);
  }

  GlmState out;
  out.h = h;
  out.m = state.m + 1;
  out.components.assign(r, Vec::Zero(n));
  for (int i = 0; i < r; ++i) {
    Vec& yi = out.components[i];
    for (int j = 0; j < r; ++j) yi += tab.V()(i, j) * y[j];
    for (int j = 0; j < s; ++j) yi += h * tab.B()(i, j) * F[j];
  }
  return out;
}

Trajectory glm_run(const Tableau& tab, const VectorField& f, const GlmState& state0, long n,
                   const ScalarField& energy, const StageSolverOptions& opts) {
  if (n < 0) throw InputError("step count must be non-negative");
  validate_state(tab, state0);
  Trajectory traj;
  traj.meta.h = state0.h;
  traj.meta.steps = n;
  traj.meta.tableau = tab.id();
  traj.meta.engine = "glm";
  traj.rows.reserve(n + 1);

  const double reference = energy ? energy(state0.components.front()) : 0.0;
  traj.append(0, state0.h, state0.components.front(), energy, reference);

  GlmState state = state0;
  for (long m = 1; m <= n; ++m) {
    StepStats st;
    try {
      state = glm_step(tab, f, state, opts, &st);
    } catch (const SolverError& e) {
      throw SolverError(e.what(), m);
    }
    traj.stats.newton_iterations += st.newton_iterations;
    traj.stats.max_newton_iterations = std::max(traj.stats.max_newton_iterations, st.newton_iterations);
    traj.append(m, state.h, state.components.front(), energy, reference);
  }
  return traj;
}

Tableau explicit_euler_tableau() {
  return Tableau::make(Mat::Zero(1, 1), Mat::Ones(1, 1), Mat::Ones(1, 1), Mat::Ones(1, 1), "explicit-euler");
}

Tableau adams_moulton_tableau(std::span<const double> betas) {
  if (betas.size() < 2) throw InputError("Adams-Moulton needs beta_0..beta_k with k >= 1");
  const int k = static_cast<int>(betas.size()) - 1;
  const int r = k + 1;
  Mat A(1, 1);
  A(0, 0) = betas[0];
  Mat U(1, r);
  U(0, 0) = 1.0;
  for (int j = 1; j <= k; ++j) U(0, j) = betas[j];
  Mat B = Mat::Zero(r, 1);
  B(0, 0) = betas[0];
  B(1, 0) = 1.0;
  Mat V = Mat::Zero(r, r);
  V.row(0) = U.row(0);
  for (int i = 2; i < r; ++i) V(i, i - 1) = 1.0;
  return Tableau::make(std::move(A), std::move(U), std::move(B), std::move(V),
                       "adams-moulton-" + std::to_string(k));
}

GlmState pack_adams_moulton(const Vec& y0, std::span<const Vec> f_history, double h) {
  GlmState state;
  state.h = h;
  state.components.push_back(y0);
  for (const auto& fv : f_history) state.components.push_back(h * fv);
  return state;
}

}  // namespace dvi
