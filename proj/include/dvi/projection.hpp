#pragma once

#include <optional>
#include <string>

#include "dvi/glm.hpp"
#include "dvi/lagrangian.hpp"

namespace dvi {

enum class ProjectionMode { off, one_shot, iterated };

std::string to_string(ProjectionMode mode);
ProjectionMode parse_projection_mode(const std::string& text);

// Projection onto the level set {y : H(y) = reference_value}. When
// reference_value is unset, runs capture H of the initial first component.
struct ProjectionConfig {
  ProjectionMode mode = ProjectionMode::iterated;
  double tol = 1e-10;
  int max_iter = 20;
  std::optional<double> reference_value;

  void validate() const;
};

struct ProjectionReport {
  int iterations = 0;
  double defect_before = 0.0;  // |H(y~) - H_ref|
  double defect_after = 0.0;
};

// y = y~ + (H_ref - H(y)) / <grad H(y~), grad H(y~)> grad H(y~), applied once
// (one-shot) or repeated with the direction frozen at y~ until
// |H(y) - H_ref| <= tol (iterated). mode == off returns y~ unchanged.
Vec project_onto_level_set(const ScalarField& H, const VectorField& grad_h, const Vec& y_tilde,
                           const ProjectionConfig& cfg, ProjectionReport* report = nullptr);

// glm_run where, after every step, the first output component is replaced by
// its projection onto the energy level set of sys; the other r - 1 components
// pass through unchanged.
Trajectory projected_glm_run(const Tableau& tab, const VectorField& f, const DegenerateLagrangianSystem& sys,
                             const GlmState& state0, long n, const ProjectionConfig& cfg,
                             const StageSolverOptions& opts = {});

}  // namespace dvi
