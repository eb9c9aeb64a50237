#include "fxts/clf.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fxts::clf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be > 0 (got " << v << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

ClfQpConfig::ClfQpConfig(Vector p_u_in, double p1_in, double q1_in, FxtsGains gains_in,
                         InputConstraintSet input_set_in, double time_budget_in)
    : p_u(std::move(p_u_in)),
      p1(p1_in),
      q1(q1_in),
      gains(gains_in),
      input_set(std::move(input_set_in)),
      time_budget(time_budget_in) {
  if (p_u.size() == 0) throw std::invalid_argument("p_u must have at least one weight");
  if (p_u.minCoeff() <= 0.0) throw std::invalid_argument("p_u weights must be > 0");
  require_positive(p1, "p1");
  require_positive(q1, "q1");
  require_positive(time_budget, "time_budget");
  if (input_set.rows() > 0 && input_set.input_dim() != p_u.size()) {
    throw std::invalid_argument("input constraint set dimension does not match p_u");
  }
}

ClfQpConfig ClfQpConfig::from_time_budget(double mu, double time_budget, Vector p_u, double p1,
                                          double q1, InputConstraintSet input_set) {
  require_positive(time_budget, "time_budget");
  double alpha = mu * std::numbers::pi / (2.0 * time_budget);
  return ClfQpConfig(std::move(p_u), p1, q1, FxtsGains(alpha, alpha, 0.0, mu),
                     std::move(input_set), time_budget);
}

qp::QpProblem build_qp(const SystemModel& model, const GoalSpec& goal, const ClfQpConfig& config,
                       const Vector& x) {
  const int m = model.input_dim();
  const int d = m + 1;
  const int nu = config.input_set.rows();

  Matrix H = Matrix::Zero(d, d);
  H.topLeftCorner(m, m) = config.p_u.asDiagonal();
  H(m, m) = config.p1;
  Vector F = Vector::Zero(d);
  F[m] = config.q1;

  double h = goal.h(x);
  Vector grad = goal.grad_h(x);
  double lf = grad.dot(model.drift(x));
  Eigen::RowVectorXd lg = grad.transpose() * model.actuation(x);

  double hp = std::max(h, 0.0);
  const FxtsGains& g = config.gains;
  double decrease = g.alpha1 * std::pow(hp, g.gamma1) + g.alpha2 * std::pow(hp, g.gamma2);

  Matrix A(nu + 1, d);
  Vector b(nu + 1);
  A.setZero();
  if (nu > 0) {
    A.topLeftCorner(nu, m) = config.input_set.A;
    b.head(nu) = config.input_set.b;
  }
  A.block(nu, 0, 1, m) = lg;
  A(nu, m) = -h;
  b[nu] = -lf - decrease;

  return qp::QpProblem(std::move(H), std::move(F), std::move(A), std::move(b));
}

std::pair<Vector, double> fallback_feasible_point(const SystemModel& model, const GoalSpec& goal,
                                                  const FxtsGains& gains, const Vector& x,
                                                  const Vector& v_bar) {
  double h = goal.h(x);
  if (std::abs(h) <= 1e-12) {
    throw std::domain_error("fallback point undefined on the goal boundary (h ~ 0)");
  }
  if (h < 0.0) {
    throw std::domain_error("fallback point requires h(x) > 0 (x outside the goal set)");
  }
  Vector grad = goal.grad_h(x);
  double lf = grad.dot(model.drift(x));
  double lgv = (grad.transpose() * model.actuation(x)).dot(v_bar);
  double delta1 =
      (lf + lgv + gains.alpha1 * std::pow(h, gains.gamma1) + gains.alpha2 * std::pow(h, gains.gamma2)) /
      h;
  return {v_bar, delta1};
}

ControlOutput control(const SystemModel& model, const GoalSpec& goal, const ClfQpConfig& config,
                      const Vector& x, qp::ActiveSetSolver& solver,
                      std::span<const int> warm_start) {
  qp::QpProblem problem = build_qp(model, goal, config, x);

  const int m = model.input_dim();
  Vector hint;
  bool have_hint = false;
  if (goal.h(x) > 1e-12) {
    Vector v_bar = Vector::Zero(m);
    if (config.input_set.contains(v_bar)) {
      auto [v, d1] = fallback_feasible_point(model, goal, config.gains, x, v_bar);
      hint.resize(m + 1);
      hint.head(m) = v;
      hint[m] = d1;
      have_hint = true;
    }
  }

  qp::QpSolution sol = solver.solve(problem, warm_start, have_hint ? &hint : nullptr);

  ControlOutput out;
  out.status = sol.status;
  if (sol.status == qp::QpStatus::Optimal) {
    out.u = sol.z.head(m);
    out.delta1_star = sol.z[m];
    out.active_set = sol.active_set;
  } else {
    out.u = Vector::Zero(m);
    out.delta1_star = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

Controller::Controller(SystemModel model, GoalSpec goal, ClfQpConfig config)
    : model_(std::move(model)), goal_(std::move(goal)), config_(std::move(config)) {
  if (config_.p_u.size() != model_.input_dim()) {
    throw std::invalid_argument("config input dimension does not match the model");
  }
}

ControlOutput Controller::operator()(const Vector& x) {
  ControlOutput out = control(model_, goal_, config_, x, solver_, warm_);
  if (out.status == qp::QpStatus::Optimal) {
    warm_ = out.active_set;
  } else {
    warm_.clear();
  }
  return out;
}

void Controller::reset() { warm_.clear(); }

ClosedLoopClassification classify_closed_loop(std::span<const double> delta1_trace,
                                              const FxtsGains& gains, double k) {
  if (delta1_trace.empty()) throw std::invalid_argument("delta1 trace is empty");
  if (!(k > 0.0 && k < 1.0)) throw std::domain_error("k must be in (0,1)");

  double d_max = -kInf;
  for (double d : delta1_trace) d_max = std::max(d_max, d);
  double ds = gains.delta_star();

  ClosedLoopClassification c;
  c.r_M = d_max / ds;
  c.mixed_regimes = false;

  if (d_max <= 0.0) {
    c.kind = ClosedLoopCase::GlobalBudget;
    c.t_bound = gains.mu * std::numbers::pi / ds;
    c.domain_level = kInf;
    return c;
  }
  if (d_max < ds) {
    // sup over the trace of the per-sample bound; the branch value is
    // non-decreasing in delta1 so this is attained at d_max, but evaluate
    // every entry to keep the definition literal
    double sup = 0.0;
    for (double d : delta1_trace) {
      sup = std::max(sup,
                     cert::settling_time_bound(FxtsGains(gains.alpha1, gains.alpha2, d, gains.mu), k));
    }
    c.kind = ClosedLoopCase::GlobalInflated;
    c.t_bound = sup;
    c.domain_level = kInf;
    return c;
  }

  c.kind = ClosedLoopCase::Local;
  c.t_bound = gains.mu * k / ((1.0 - k) * std::sqrt(gains.alpha1 * gains.alpha2));
  double v1_inf = kInf;
  bool below = false;
  for (double d : delta1_trace) {
    if (d >= ds) {
      // smaller root in s of alpha1 s^2 - d s + alpha2, factored discriminant
      double v1 = (d - std::sqrt((d - ds) * (d + ds))) / (2.0 * gains.alpha1);
      v1_inf = std::min(v1_inf, v1);
    } else {
      below = true;
    }
  }
  c.mixed_regimes = below;
  c.domain_level = std::pow(v1_inf, gains.mu);
  return c;
}

}  // namespace fxts::clf
