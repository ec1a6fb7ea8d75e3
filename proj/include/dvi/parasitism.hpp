#pragma once

#include <complex>
#include <vector>

#include "dvi/glm.hpp"

namespace dvi {

using Complex = std::complex<double>;

// |xi - 1| at or below this counts as the principal root.
inline constexpr double kPrincipalTolerance = 1e-8;
// Eigenvalues of modulus at or below this are annihilated in one step and
// carry no growth parameter (xi^-1 is undefined).
inline constexpr double kZeroRootTolerance = 1e-8;

// A left eigenpair w* V = xi w* with ||w||_2 = 1.
struct LeftEigenpair {
  Complex value;
  CVec vector;
  double residual = 0.0;   // ||w* V - xi w*||_2
  bool defective = false;  // eigenspace of this value is incomplete
};

// All r eigenvalues of V (with multiplicity) and unit-norm left
// eigenvectors. Principal roots come first, then decreasing modulus. For a
// defective eigenvalue the available eigenvectors are repeated and the pairs
// are flagged.
std::vector<LeftEigenpair> left_eigenpairs(const Mat& V);

struct GrowthParameter {
  Complex xi;
  Complex mu;
  CVec w;
  bool defective = false;
};

struct ParasitismReport {
  std::vector<Complex> eigenvalues;
  std::vector<CVec> left_eigenvectors;
  std::vector<GrowthParameter> growth_parameters;
  int principal_count = 0;
  int annihilated_count = 0;  // eigenvalues at zero
  bool defective = false;
};

// mu = xi^-1 w* B U w, with w scaled to unit 2-norm first.
Complex growth_parameter(const Tableau& tab, Complex xi, const CVec& w);

// First-order growth parameters of every non-principal, nonzero eigenvalue of
// V, one per independent left eigenvector. Throws PreconditionError when V
// has no eigenvalue at 1.
ParasitismReport parasitic_growth_parameters(const Tableau& tab);

}  // namespace dvi
