#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dvi {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

using VectorField = std::function<Vec(const Vec&)>;
using ScalarField = std::function<double(const Vec&)>;
using MatrixField = std::function<Mat(const Vec&)>;

// Malformed input: bad tableau shape, unparseable file, bad configuration.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A method was applied outside its preconditions (e.g. a tableau with no
// principal root handed to the parasitism analysis).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure while stepping: Newton divergence, singular Jacobian,
// non-finite function values, projection failure.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, std::optional<long> step = std::nullopt)
      : std::runtime_error(what), step_(step) {}

  std::optional<long> step() const { return step_; }

 private:
  std::optional<long> step_;
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace dvi
