#pragma once

#include <string>

#include "dvi/types.hpp"

namespace dvi::detail {

struct Residual {
  Vec value;
  double scale = 0.0;  // magnitude of the largest term entering the residual
};

struct NewtonResult {
  Vec x;
  int iterations = 0;
  double residual = 0.0;
};

// Plain Newton iteration; converged once ||F||_inf <= tol * scale.
template <class ResidualFn, class JacobianFn>
NewtonResult newton_solve(ResidualFn&& residual, JacobianFn&& jacobian, Vec x, double tol, int max_iter,
                          const char* what) {
  for (int it = 0;; ++it) {
    const Residual F = residual(x);
    if (!F.value.allFinite()) throw SolverError(std::string(what) + ": non-finite residual");
    const double norm = F.value.template lpNorm<Eigen::Infinity>();
    if (norm <= tol * F.scale || norm == 0.0) return {std::move(x), it, norm};
    if (it == max_iter) {
      throw SolverError(std::string(what) + ": Newton iteration did not converge in " + std::to_string(max_iter) +
                        " iterations (residual " + std::to_string(norm) + ")");
    }
    Eigen::FullPivLU<Mat> lu(jacobian(x));
    if (!lu.isInvertible()) throw SolverError(std::string(what) + ": singular Newton matrix");
    x -= lu.solve(F.value);
  }
}

inline double inf_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

}  // namespace dvi::detail
