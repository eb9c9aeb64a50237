#include "fxts/core.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fxts {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be finite (got " << v << ")";
    fail(os.str());
  }
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (v <= 0.0) {
    std::ostringstream os;
    os << name << " must be > 0 (got " << v << ")";
    fail(os.str());
  }
}

}  // namespace

FxtsGains::FxtsGains(double alpha1_in, double alpha2_in, double delta1_in, double mu_in)
    : alpha1(alpha1_in), alpha2(alpha2_in), delta1(delta1_in), mu(mu_in) {
  require_positive(alpha1, "alpha1");
  require_positive(alpha2, "alpha2");
  require_finite(delta1, "delta1");
  require_finite(mu, "mu");
  if (mu <= 1.0) {
    std::ostringstream os;
    os << "mu must be > 1 (got " << mu << ")";
    fail(os.str());
  }
  gamma1 = 1.0 + 1.0 / mu;
  gamma2 = 1.0 - 1.0 / mu;
  r = delta1 / (2.0 * std::sqrt(alpha1 * alpha2));
  if (!std::isfinite(r)) fail("ratio r = delta1/(2 sqrt(alpha1 alpha2)) is not finite");
}

double FxtsGains::delta_star() const { return 2.0 * std::sqrt(alpha1 * alpha2); }

NominalFxtsGains::NominalFxtsGains(double a_in, double b_in, double p_in, double q_in)
    : a(a_in), b(b_in), p(p_in), q(q_in) {
  require_positive(a, "a");
  require_positive(b, "b");
  require_finite(p, "p");
  require_finite(q, "q");
  if (p <= 0.0 || p >= 1.0) {
    std::ostringstream os;
    os << "p must be in (0,1) (got " << p << ")";
    fail(os.str());
  }
  if (q <= 1.0) {
    std::ostringstream os;
    os << "q must be > 1 (got " << q << ")";
    fail(os.str());
  }
}

SystemModel::SystemModel(int state_dim, int input_dim, DriftFn drift, ActuationFn actuation)
    : n_(state_dim), m_(input_dim), f_(std::move(drift)), g_(std::move(actuation)) {
  if (n_ <= 0) fail("state_dim must be positive");
  if (m_ <= 0) fail("input_dim must be positive");
  if (!f_) fail("drift callable is empty");
  if (!g_) fail("actuation callable is empty");
}

Vector SystemModel::drift(const Vector& x) const {
  if (x.size() != n_) fail("state passed to drift has wrong dimension");
  Vector fx = f_(x);
  if (fx.size() != n_) fail("drift returned a vector of wrong dimension");
  return fx;
}

Matrix SystemModel::actuation(const Vector& x) const {
  if (x.size() != n_) fail("state passed to actuation has wrong dimension");
  Matrix gx = g_(x);
  if (gx.rows() != n_ || gx.cols() != m_) fail("actuation returned a matrix of wrong dimensions");
  return gx;
}

GoalSpec::GoalSpec(ScalarFn h, GradFn grad_h, bool analytic)
    : h_(std::move(h)), grad_(std::move(grad_h)), analytic_(analytic) {
  if (!h_) fail("goal function h is empty");
  if (!grad_) fail("goal gradient grad_h is empty");
}

double GoalSpec::h(const Vector& x) const { return h_(x); }

Vector GoalSpec::grad_h(const Vector& x) const {
  Vector g = grad_(x);
  if (g.size() != x.size()) fail("grad_h returned a vector of wrong dimension");
  return g;
}

GradientCheckReport check_gradient(const GoalSpec& goal, const std::vector<Vector>& states,
                                   unsigned seed) {
  constexpr double kStep = 1e-6;
  constexpr double kRelTol = 1e-4;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  GradientCheckReport rep;
  for (const Vector& x : states) {
    Vector d(x.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = gauss(rng);
    double nrm = d.norm();
    if (nrm == 0.0) d.setOnes(), nrm = d.norm();
    d /= nrm;

    double fd = (goal.h(x + kStep * d) - goal.h(x - kStep * d)) / (2.0 * kStep);
    double an = goal.grad_h(x).dot(d);
    double err = std::abs(fd - an);
    double rel = err / (1.0 + std::abs(goal.h(x)));
    rep.max_abs_err = std::max(rep.max_abs_err, err);
    rep.max_rel_err = std::max(rep.max_rel_err, rel);
  }
  rep.passed = rep.max_rel_err <= kRelTol;
  return rep;
}

InputConstraintSet::InputConstraintSet(Matrix A_in, Vector b_in)
    : A(std::move(A_in)), b(std::move(b_in)) {
  if (A.rows() != b.size()) fail("input constraint dimensions inconsistent (rows(A) != size(b))");
  if (A.rows() > 0 && A.cols() <= 0) fail("input constraint matrix has no columns");
}

InputConstraintSet InputConstraintSet::box(int input_dim, double u_max) {
  if (input_dim <= 0) fail("input_dim must be positive");
  require_positive(u_max, "u_max");
  Matrix A(2 * input_dim, input_dim);
  A.topRows(input_dim) = Matrix::Identity(input_dim, input_dim);
  A.bottomRows(input_dim) = -Matrix::Identity(input_dim, input_dim);
  Vector b = Vector::Constant(2 * input_dim, u_max);
  return InputConstraintSet(std::move(A), std::move(b));
}

InputConstraintSet InputConstraintSet::unbounded(int input_dim) {
  if (input_dim <= 0) fail("input_dim must be positive");
  return InputConstraintSet(Matrix(0, input_dim), Vector(0));
}

bool InputConstraintSet::contains(const Vector& v, double tol) const {
  if (v.size() != input_dim() && rows() > 0) fail("input has wrong dimension");
  if (rows() == 0) return true;
  return ((A * v - b).array() <= tol).all();
}

}  // namespace fxts
