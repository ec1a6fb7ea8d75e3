#pragma once

#include <span>
#include <vector>

#include "dvi/trajectory.hpp"
#include "dvi/types.hpp"

namespace dvi {

// Characteristic matrices (A, U, B, V) of a general linear method with s
// stages and r input quantities. Immutable once constructed.
class Tableau {
 public:
  // Validates shapes (s x s, s x r, r x s, r x r) and finiteness; s and r are
  // taken from A and V. Throws InputError on mismatch.
  static Tableau make(Mat A, Mat U, Mat B, Mat V, std::string id = {});

  int stages() const { return static_cast<int>(A_.rows()); }
  int inputs() const { return static_cast<int>(V_.rows()); }

  const Mat& A() const { return A_; }
  const Mat& U() const { return U_; }
  const Mat& B() const { return B_; }
  const Mat& V() const { return V_; }
  const std::string& id() const { return id_; }

  bool is_explicit() const;          // A strictly lower triangular
  bool is_diagonally_implicit() const;  // A lower triangular

 private:
  Tableau(Mat A, Mat U, Mat B, Mat V, std::string id)
      : A_(std::move(A)), U_(std::move(U)), B_(std::move(B)), V_(std::move(V)), id_(std::move(id)) {}

  Mat A_, U_, B_, V_;
  std::string id_;
};

// The r-component vector passed between steps, together with h and the step
// index m of the values it holds.
struct GlmState {
  std::vector<Vec> components;
  double h = 0.0;
  long m = 0;

  int dimension() const { return components.empty() ? 0 : static_cast<int>(components.front().size()); }
};

struct StageSolverOptions {
  double tol = 1e-12;  // on the stage residual, relative to the stage magnitudes
  int max_iter = 50;
  MatrixField jacobian;  // optional analytic Df; forward differences otherwise
};

struct StepStats {
  int newton_iterations = 0;
  int function_evaluations = 0;
};

// y^[m] = h (B x I) f(K) + (V x I) y^[m-1], with the stages K solving
// K = h (A x I) f(K) + (U x I) y^[m-1].
GlmState glm_step(const Tableau& tab, const VectorField& f, const GlmState& state,
                  const StageSolverOptions& opts = {}, StepStats* stats = nullptr);

// Checks r components of a common dimension and h > 0.
void validate_state(const Tableau& tab, const GlmState& state);

// Iterates glm_step n times, recording the first component y_1^[m] at
// t = m h for m = 0..n. When energy is given, rows carry H and the defect
// relative to the first row.
Trajectory glm_run(const Tableau& tab, const VectorField& f, const GlmState& state0, long n,
                   const ScalarField& energy = {}, const StageSolverOptions& opts = {});

// Explicit Euler written as a one-stage, one-input method.
Tableau explicit_euler_tableau();

// Adams-Moulton method y_m = y_{m-1} + h sum_j beta_j f(y_{m-j}) in GLM form:
// one stage, inputs (y_{m-1}, h f(y_{m-1}), ..., h f(y_{m-k})).
// betas = (beta_0, ..., beta_k), k >= 1.
Tableau adams_moulton_tableau(std::span<const double> betas);

// Input vector for adams_moulton_tableau from y_0 and the history
// f(y_0), f(y_{-1}), ... (exactly k values).
GlmState pack_adams_moulton(const Vec& y0, std::span<const Vec> f_history, double h);

}  // namespace dvi
