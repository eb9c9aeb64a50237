#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace fxts {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Parameters of the Lyapunov decrease condition
//
//   dV/dt <= -alpha1 V^gamma1 - alpha2 V^gamma2 + delta1 V,
//
// with gamma1 = 1 + 1/mu and gamma2 = 1 - 1/mu for some mu > 1. The sign and
// magnitude of delta1 relative to 2 sqrt(alpha1 alpha2) decide whether
// convergence is global or only from a bounded sublevel set.
struct FxtsGains {
  double alpha1;
  double alpha2;
  double delta1;
  double mu;

  // derived
  double gamma1;  // 1 + 1/mu, > 1
  double gamma2;  // 1 - 1/mu, in (0,1)
  double r;       // delta1 / (2 sqrt(alpha1 alpha2))

  FxtsGains(double alpha1, double alpha2, double delta1, double mu);

  double delta_star() const;  // 2 sqrt(alpha1 alpha2)
};

// Parameters of the nominal (no positive term) condition
// dV/dt <= -a V^p - b V^q with 0 < p < 1 < q.
struct NominalFxtsGains {
  double a;
  double b;
  double p;
  double q;

  NominalFxtsGains(double a, double b, double p, double q);
};

// Control-affine dynamics xdot = f(x) + g(x) u with x in R^n, u in R^m.
// Evaluations check the returned dimensions against the declared ones.
class SystemModel {
 public:
  using DriftFn = std::function<Vector(const Vector&)>;
  using ActuationFn = std::function<Matrix(const Vector&)>;

  SystemModel(int state_dim, int input_dim, DriftFn drift, ActuationFn actuation);

  int state_dim() const { return n_; }
  int input_dim() const { return m_; }

  Vector drift(const Vector& x) const;
  Matrix actuation(const Vector& x) const;

 private:
  int n_;
  int m_;
  DriftFn f_;
  ActuationFn g_;
};

// Goal set S_G = {x | h(x) <= 0} with user-supplied analytic gradient.
class GoalSpec {
 public:
  using ScalarFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;

  GoalSpec(ScalarFn h, GradFn grad_h, bool analytic = true);

  double h(const Vector& x) const;
  Vector grad_h(const Vector& x) const;
  bool analytic() const { return analytic_; }
  bool contains(const Vector& x) const { return h(x) <= 0.0; }

 private:
  ScalarFn h_;
  GradFn grad_;
  bool analytic_;
};

// Central-difference audit of grad_h against h. This is an explicit check the
// caller opts into; the gradient is never replaced by finite differences.
struct GradientCheckReport {
  double max_abs_err = 0.0;  // worst |d_fd - grad.d| over all probes
  double max_rel_err = 0.0;  // worst err / (1 + |h|)
  bool passed = false;       // max_rel_err <= 1e-4 with step 1e-6
};

GradientCheckReport check_gradient(const GoalSpec& goal, const std::vector<Vector>& states,
                                   unsigned seed = 0);

// Input polytope U = {v | A v <= b}. The caller declares it nonempty.
struct InputConstraintSet {
  Matrix A;  // n_c x m
  Vector b;  // n_c

  InputConstraintSet(Matrix A, Vector b);

  // |u_i| <= u_max as 2m rows: [I; -I] v <= u_max 1.
  static InputConstraintSet box(int input_dim, double u_max);
  // no rows: all of R^m
  static InputConstraintSet unbounded(int input_dim);

  int rows() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(A.cols()); }
  bool contains(const Vector& v, double tol = 1e-9) const;
};

}  // namespace fxts
