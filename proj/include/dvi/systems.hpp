#pragma once

#include <string>
#include <vector>

#include "dvi/lagrangian.hpp"

namespace dvi {

// Nonlinear pendulum in first-order form: alpha(q) = (q_2, 0),
// H(q) = q_2^2 / 2 - cos q_1.
DegenerateLagrangianSystem pendulum();

// Phase-space Lagrangian of a canonical Hamiltonian on R^{2d}, coordinates
// x = (q, p): alpha(x) = (p, 0), so the induced field is Hamilton's equations.
DegenerateLagrangianSystem canonical_system(int d, ScalarField H, VectorField grad_h, std::string name = "canonical");

// Presets available as "canonical:<preset>".
DegenerateLagrangianSystem harmonic_oscillator();     // H = (p^2 + q^2) / 2
DegenerateLagrangianSystem canonical_pendulum();      // H = p^2 / 2 - cos q
DegenerateLagrangianSystem henon_heiles();            // d = 2

// "pendulum" or "canonical:<preset>". Throws InputError for unknown names.
DegenerateLagrangianSystem system_by_name(const std::string& name);
std::vector<std::string> system_names();

}  // namespace dvi
