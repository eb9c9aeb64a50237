#include "fxts/case_study.hpp"

#include <cmath>

namespace fxts {

double case_study_zeta(double z) {
  return (0.8 + 0.2 * std::exp(-100.0 * std::abs(z))) * std::tanh(z);
}

SystemModel case_study_model() {
  auto drift = [](const Vector& x) -> Vector {
    double d = x[0] * x[0] + x[1] * x[1] - 1.0;
    Vector f(2);
    f[0] = x[1] + x[0] * d;
    f[1] = -x[0] + case_study_zeta(x[1]) * d;
    return f;
  };
  auto actuation = [](const Vector& x) -> Matrix {
    Matrix g(2, 1);
    g(0, 0) = x[0];
    g(1, 0) = x[1];
    return g;
  };
  return SystemModel(2, 1, drift, actuation);
}

GoalSpec case_study_goal() {
  auto h = [](const Vector& x) -> double { return x.squaredNorm() - 1.0; };
  auto grad = [](const Vector& x) -> Vector { return 2.0 * x; };
  return GoalSpec(h, grad, true);
}

}  // namespace fxts
