#include "dvi/parasitism.hpp"

#include <algorithm>
#include <cmath>

namespace dvi {

namespace {

struct Cluster {
  Complex value;
  int multiplicity = 0;
};

// Groups numerically coincident eigenvalues; a cluster's value is the mean
// of its members, which cancels the O(sqrt(eps)) splitting of Jordan blocks.
std::vector<Cluster> cluster_eigenvalues(const Eigen::VectorXcd& values) {
  std::vector<Complex> pending(values.data(), values.data() + values.size());
  std::vector<Cluster> clusters;
  while (!pending.empty()) {
    const Complex seed = pending.front();
    const double tol = 1e-6 * std::max(1.0, std::abs(seed));
    Complex sum = 0.0;
    int count = 0;
    auto it = std::partition(pending.begin(), pending.end(),
                             [&](const Complex& z) { return std::abs(z - seed) > tol; });
    for (auto j = it; j != pending.end(); ++j) {
      sum += *j;
      ++count;
    }
    pending.erase(it, pending.end());
    clusters.push_back({sum / static_cast<double>(count), count});
  }
  return clusters;
}

bool sorts_before(const Complex& a, const Complex& b) {
  const bool pa = std::abs(a - 1.0) <= kPrincipalTolerance;
  const bool pb = std::abs(b - 1.0) <= kPrincipalTolerance;
  if (pa != pb) return pa;
  if (std::abs(std::abs(a) - std::abs(b)) > 1e-12) return std::abs(a) > std::abs(b);
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

}  // namespace

std::vector<LeftEigenpair> left_eigenpairs(const Mat& V) {
  if (V.rows() != V.cols() || V.rows() == 0) throw InputError("left_eigenpairs needs a non-empty square matrix");
  if (!V.allFinite()) throw InputError("left_eigenpairs: matrix has a non-finite entry");
  const auto r = V.rows();

  Eigen::EigenSolver<Mat> solver(V, false);
  if (solver.info() != Eigen::Success) throw SolverError("eigenvalue iteration failed to converge");

  const Eigen::MatrixXcd Vt = V.transpose().cast<Complex>();
  const double null_tol = 1e-8 * std::max(1.0, V.cwiseAbs().maxCoeff());

  std::vector<LeftEigenpair> pairs;
  pairs.reserve(r);
  for (const Cluster& c : cluster_eigenvalues(solver.eigenvalues())) {
    // Left eigenvectors of V are (conjugated) right null vectors of V^T - xi I.
    const Eigen::MatrixXcd shifted = Vt - c.value * Eigen::MatrixXcd::Identity(r, r);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    int independent = 1;
    while (independent < c.multiplicity && sigma[r - 1 - independent] <= null_tol) ++independent;
    const bool defective = independent < c.multiplicity;

    for (int k = 0; k < c.multiplicity; ++k) {
      const CVec x = svd.matrixV().col(r - 1 - (k % independent));
      LeftEigenpair p;
      p.value = c.value;
      p.vector = x.conjugate().normalized();
      p.residual = (Vt * x - c.value * x).norm() / x.norm();
      p.defective = defective;
      pairs.push_back(std::move(p));
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const LeftEigenpair& a, const LeftEigenpair& b) { return sorts_before(a.value, b.value); });
  return pairs;
}

Complex growth_parameter(const Tableau& tab, Complex xi, const CVec& w) {
  if (w.size() != tab.inputs()) throw InputError("eigenvector length does not match the tableau input count");
  const double norm = w.norm();
  if (norm == 0.0) throw InputError("eigenvector must be nonzero");
  if (std::abs(xi) <= kZeroRootTolerance) throw PreconditionError("growth parameter undefined for a zero root");
  const CVec unit = w / norm;
  const Eigen::MatrixXcd BU = (tab.B() * tab.U()).cast<Complex>();
  const Complex quadratic = unit.dot(BU * unit);  // conjugates the first argument: w* (BU) w
  return quadratic / xi;
}

ParasitismReport parasitic_growth_parameters(const Tableau& tab) {
  ParasitismReport report;
  const auto pairs = left_eigenpairs(tab.V());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    report.eigenvalues.push_back(p.value);
    report.left_eigenvectors.push_back(p.vector);
    report.defective = report.defective || p.defective;
    if (std::abs(p.value - 1.0) <= kPrincipalTolerance) {
      ++report.principal_count;
      continue;
    }
    if (std::abs(p.value) <= kZeroRootTolerance) {
      ++report.annihilated_count;
      continue;
    }
    // Defective clusters repeat their eigenvectors; report each distinct one once.
    const bool repeated = std::any_of(pairs.begin(), pairs.begin() + static_cast<long>(i), [&](const auto& q) {
      return q.value == p.value && (q.vector - p.vector).norm() == 0.0;
    });
    if (repeated) continue;
    report.growth_parameters.push_back({p.value, growth_parameter(tab, p.value, p.vector), p.vector, p.defective});
  }
  if (report.principal_count == 0) {
    throw PreconditionError("V has no eigenvalue equal to 1: the method is not preconsistent");
  }
  return report;
}

}  // namespace dvi
