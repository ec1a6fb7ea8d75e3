#include "dvi/projection.hpp"

#include <algorithm>
#include <cmath>

namespace dvi {

std::string to_string(ProjectionMode mode) {
  switch (mode) {
    case ProjectionMode::off: return "off";
    case ProjectionMode::one_shot: return "one-shot";
    case ProjectionMode::iterated: return "iterated";
  }
  return "off";
}

ProjectionMode parse_projection_mode(const std::string& text) {
  if (text == "off") return ProjectionMode::off;
  if (text == "one-shot") return ProjectionMode::one_shot;
  if (text == "iterated") return ProjectionMode::iterated;
  throw InputError("unknown projection mode '" + text + "' (expected off, one-shot or iterated)");
}

void ProjectionConfig::validate() const {
  if (!(tol > 0.0)) throw InputError("projection tolerance must be positive");
  if (max_iter < 1) throw InputError("projection iteration limit must be at least 1");
}

Vec project_onto_level_set(const ScalarField& H, const VectorField& grad_h, const Vec& y_tilde,
                           const ProjectionConfig& cfg, ProjectionReport* report) {
  cfg.validate();
  if (!cfg.reference_value) throw InputError("projection needs a reference value");
  const double target = *cfg.reference_value;

  ProjectionReport rep;
  double defect = target - H(y_tilde);
  rep.defect_before = rep.defect_after = std::abs(defect);
  if (cfg.mode == ProjectionMode::off || defect == 0.0 ||
      (cfg.mode == ProjectionMode::iterated && std::abs(defect) <= cfg.tol)) {
    if (report) *report = rep;
    return y_tilde;
  }

  const Vec direction = grad_h(y_tilde);
  const double norm2 = direction.squaredNorm();
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw SolverError("projection direction undefined: gradient of H vanishes off the level set");
  }

  Vec y = y_tilde;
  const int limit = cfg.mode == ProjectionMode::one_shot ? 1 : cfg.max_iter;
  for (int it = 0; it < limit; ++it) {
    y += (defect / norm2) * direction;
    ++rep.iterations;
    defect = target - H(y);
    if (!std::isfinite(defect)) throw SolverError("projection produced a non-finite energy");
    if (std::abs(defect) <= cfg.tol) break;
  }
  rep.defect_after = std::abs(defect);
  if (report) *report = rep;
  if (cfg.mode == ProjectionMode::iterated && rep.defect_after > cfg.tol) {
    throw SolverError("projection did not reach tolerance in " + std::to_string(cfg.max_iter) + " iterations");
  }
  return y;
}

Trajectory projected_glm_run(const Tableau& tab, const VectorField& f, const DegenerateLagrangianSystem& sys,
                             const GlmState& state0, long n, const ProjectionConfig& cfg,
                             const StageSolverOptions& opts) {
  if (n < 0) throw InputError("step count must be non-negative");
  validate_state(tab, state0);
  cfg.validate();

  ProjectionConfig pcfg = cfg;
  if (!pcfg.reference_value) pcfg.reference_value = sys.hamiltonian(state0.components.front());
  const double reference = *pcfg.reference_value;
  const bool projecting = cfg.mode != ProjectionMode::off;

  Trajectory traj;
  traj.meta.system = sys.name;
  traj.meta.h = state0.h;
  traj.meta.steps = n;
  traj.meta.projection = to_string(cfg.mode);
  traj.meta.tableau = tab.id();
  traj.meta.engine = "glm";
  traj.rows.reserve(n + 1);
  traj.append(0, state0.h, state0.components.front(), sys.hamiltonian, reference);

  GlmState state = state0;
  for (long m = 1; m <= n; ++m) {
    StepStats st;
    ProjectionReport rep;
    try {
      state = glm_step(tab, f, state, opts, &st);
      if (projecting) {
        state.components.front() =
            project_onto_level_set(sys.hamiltonian, sys.grad_h, state.components.front(), pcfg, &rep);
      }
    } catch (const SolverError& e) {
      throw SolverError(e.what(), m);
    }
    traj.stats.newton_iterations += st.newton_iterations;
    traj.stats.max_newton_iterations = std::max(traj.stats.max_newton_iterations, st.newton_iterations);
    traj.stats.projection_iterations += rep.iterations;
    traj.stats.max_projection_iterations = std::max(traj.stats.max_projection_iterations, rep.iterations);
    if (projecting) {
      traj.append(m, state.h, state.components.front(), sys.hamiltonian, reference, true, rep.defect_before);
    } else {
      traj.append(m, state.h, state.components.front(), sys.hamiltonian, reference);
    }
  }
  return traj;
}

}  // namespace dvi
