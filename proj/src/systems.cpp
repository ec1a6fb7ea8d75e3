#include "dvi/systems.hpp"

#include <cmath>

namespace dvi {

DegenerateLagrangianSystem pendulum() {
  DegenerateLagrangianSystem sys;
  sys.name = "pendulum";
  sys.dim = 2;
  sys.alpha = [](const Vec& q) { return Vec{{q[1], 0.0}}; };
  sys.d_alpha = [](const Vec&) { return Mat{{0.0, 1.0}, {0.0, 0.0}}; };
  sys.hamiltonian = [](const Vec& q) { return 0.5 * q[1] * q[1] - std::cos(q[0]); };
  sys.grad_h = [](const Vec& q) { return Vec{{std::sin(q[0]), q[1]}}; };
  return sys;
}

DegenerateLagrangianSystem canonical_system(int d, ScalarField H, VectorField grad_h, std::string name) {
  if (d < 1) throw InputError("canonical system needs d >= 1");
  DegenerateLagrangianSystem sys;
  sys.name = std::move(name);
  sys.dim = 2 * d;
  sys.alpha = [d](const Vec& x) {
    Vec a = Vec::Zero(2 * d);
    a.head(d) = x.tail(d);
    return a;
  };
  sys.d_alpha = [d](const Vec&) {
    Mat D = Mat::Zero(2 * d, 2 * d);
    D.topRightCorner(d, d).setIdentity();
    return D;
  };
  sys.hamiltonian = std::move(H);
  sys.grad_h = std::move(grad_h);
  return sys;
}

DegenerateLagrangianSystem harmonic_oscillator() {
  return canonical_system(
      1, [](const Vec& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); },
      [](const Vec& x) { return Vec{{x[0], x[1]}}; }, "canonical:harmonic");
}

DegenerateLagrangianSystem canonical_pendulum() {
  return canonical_system(
      1, [](const Vec& x) { return 0.5 * x[1] * x[1] - std::cos(x[0]); },
      [](const Vec& x) { return Vec{{std::sin(x[0]), x[1]}}; }, "canonical:pendulum");
}

DegenerateLagrangianSystem henon_heiles() {
  // x = (q1, q2, p1, p2)
  return canonical_system(
      2,
      [](const Vec& x) {
        return 0.5 * (x[2] * x[2] + x[3] * x[3]) + 0.5 * (x[0] * x[0] + x[1] * x[1]) + x[0] * x[0] * x[1] -
               x[1] * x[1] * x[1] / 3.0;
      },
      [](const Vec& x) {
        return Vec{{x[0] + 2.0 * x[0] * x[1], x[1] + x[0] * x[0] - x[1] * x[1], x[2], x[3]}};
      },
      "canonical:henon-heiles");
}

DegenerateLagrangianSystem system_by_name(const std::string& name) {
  if (name == "pendulum") return pendulum();
  if (name == "canonical:harmonic") return harmonic_oscillator();
  if (name == "canonical:pendulum") return canonical_pendulum();
  if (name == "canonical:henon-heiles") return henon_heiles();
  throw InputError("unknown system '" + name + "'");
}

std::vector<std::string> system_names() {
  return {"pendulum", "canonical:harmonic", "canonical:pendulum", "canonical:henon-heiles"};
}

}  // namespace dvi
