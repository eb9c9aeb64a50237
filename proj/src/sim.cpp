#include "fxts/sim.hpp"

#include "fxts/cert.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fxts::sim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kHitLevel = 1e-9;

Vector rk4_step(const SystemModel& model, const Vector& x, const Vector& u, double dt) {
  auto f = [&](const Vector& s) -> Vector { return model.drift(s) + model.actuation(s) * u; };
  Vector k1 = f(x);
  Vector k2 = f(x + 0.5 * dt * k1);
  Vector k3 = f(x + 0.5 * dt * k2);
  Vector k4 = f(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool state_ok(const Vector& x, double cutoff) {
  return x.allFinite() && x.lpNorm<Eigen::Infinity>() <= cutoff;
}

// Bisection inside one step for the time where h crosses zero. h > 0 at the
// step start and h <= 0 after the full step on entry. Returns the substep
// length whose endpoint has |h| <= 1e-10 (well inside the 1e-8 contract).
double refine_entry(const SystemModel& model, const GoalSpec& goal, const Vector& x,
                    const Vector& u, double dt) {
  double lo = 0.0;
  double hi = dt;
  double h_hi = goal.h(rk4_step(model, x, u, hi));
  for (int it = 0; it < 120; ++it) {
    double mid = 0.5 * (lo + hi);
    double h_mid = goal.h(rk4_step(model, x, u, mid));
    if (h_mid <= 0.0) {
      hi = mid;
      h_hi = h_mid;
    } else {
      lo = mid;
    }
    if (std::abs(h_hi) <= 1e-10 || (hi - lo) <= 1e-15 * dt) break;
  }
  return hi;
}

struct InputPolicy {
  // returns (u, delta1) at x; delta1 is NaN for open loop
  virtual std::pair<Vector, double> operator()(const Vector& x) = 0;
  virtual ~InputPolicy() = default;
};

Trajectory run(const SystemModel& model, const GoalSpec& goal, InputPolicy& policy,
               const Vector& x0, const SimOptions& options) {
  if (!(options.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(options.t_end >= options.dt)) throw std::invalid_argument("t_end must be >= dt");
  if (x0.size() != model.state_dim()) throw std::invalid_argument("x0 has wrong dimension");

  Trajectory traj;
  const double dt = options.dt;
  double stop_at = options.t_end;

  Vector x = x0;
  double t = 0.0;

  auto record = [&](double time, const Vector& state, const Vector& u, double d1) {
    traj.times.push_back(time);
    traj.states.push_back(state);
    traj.inputs.push_back(u);
    traj.delta1_values.push_back(d1);
    traj.h_values.push_back(goal.h(state));
    if (u.size() > 0) traj.input_norm_max = std::max(traj.input_norm_max, u.lpNorm<Eigen::Infinity>());
  };

  bool entered = false;

  for (long step = 0;; ++step) {
    auto [u, d1] = policy(x);
    record(t, x, u, d1);

    if (!entered && traj.h_values.back() <= 0.0) {
      // starting inside (or exactly on) the goal set
      traj.goal_entry_time = t;
      entered = true;
      stop_at = std::min(options.t_end, t + options.post_entry_time);
    }
    if (t + 0.5 * dt > stop_at) break;

    Vector x_next = rk4_step(model, x, u, dt);
    if (!state_ok(x_next, options.divergence_norm)) {
      traj.diverged = true;
      break;
    }

    double h_next = goal.h(x_next);
    if (!entered && traj.h_values.back() > 0.0 && h_next <= 0.0) {
      double tau = refine_entry(model, goal, x, u, dt);
      double t_entry = t + tau;
      traj.goal_entry_time = t_entry;
      entered = true;
      if (options.post_entry_time <= 0.0) {
        Vector x_entry = rk4_step(model, x, u, tau);
        auto [u_e, d1_e] = policy(x_entry);
        record(t_entry, x_entry, u_e, d1_e);
        break;
      }
      // keep at least the next grid row so a recorded state has h <= 0
      stop_at = std::min(options.t_end, std::max(t_entry + options.post_entry_time, t + dt));
    }

    x = std::move(x_next);
    t = (step + 1) * dt;
  }
  return traj;
}

}  // namespace

double Trajectory::max_delta1() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double d : delta1_values) {
    if (!std::isnan(d)) m = std::max(m, d);
  }
  return m;
}

Trajectory simulate(const SystemModel& model, const GoalSpec& goal, const clf::ClfQpConfig& config,
                    const Vector& x0, const SimOptions& options) {
  struct ClfPolicy final : InputPolicy {
    clf::Controller controller;
    Vector last_u;
    double last_d1 = kNaN;
    int holds = 0;

    ClfPolicy(const SystemModel& m, const GoalSpec& g, const clf::ClfQpConfig& c)
        : controller(m, g, c), last_u(Vector::Zero(m.input_dim())) {}

    std::pair<Vector, double> operator()(const Vector& x) override {
      clf::ControlOutput out = controller(x);
      if (out.status == qp::QpStatus::Optimal) {
        last_u = out.u;
        last_d1 = out.delta1_star;
        return {out.u, out.delta1_star};
      }
      // only reachable inside S_G (feasibility holds outside); hold the input
      ++holds;
      return {last_u, last_d1};
    }
  };

  ClfPolicy policy(model, goal, config);
  Trajectory traj = run(model, goal, policy, x0, options);
  traj.infeasible_holds = policy.holds;
  return traj;
}

Trajectory simulate_open_loop(const SystemModel& model, const GoalSpec& goal, const Vector& x0,
                              const SimOptions& options) {
  struct ZeroPolicy final : InputPolicy {
    Vector zero;
    explicit ZeroPolicy(int m) : zero(Vector::Zero(m)) {}
    std::pair<Vector, double> operator()(const Vector&) override { return {zero, kNaN}; }
  };
  ZeroPolicy policy(model.input_dim());
  return run(model, goal, policy, x0, options);
}

VTrace simulate_v_ode(const FxtsGains& gains, double v0, double dt, double t_end) {
  if (!(v0 >= 0.0)) throw std::invalid_argument("v0 must be nonnegative");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (t_end <= 0.0) t_end = cert::settling_time_bound(gains, 0.99) * 1.05 + 10.0 * dt;

  auto rhs = [&gains](double v) -> double {
    if (v <= 0.0) return 0.0;
    return -gains.alpha1 * std::pow(v, gains.gamma1) - gains.alpha2 * std::pow(v, gains.gamma2) +
           gains.delta1 * v;
  };

  VTrace trace;
  trace.dt = dt;
  double v = v0;
  double t = 0.0;
  trace.values.push_back(v);
  if (v <= kHitLevel) {
    trace.hit_time = 0.0;
    return trace;
  }

  const long steps = static_cast<long>(std::ceil(t_end / dt));
  for (long i = 0; i < steps; ++i) {
    double k1 = rhs(v);
    double k2 = rhs(v + 0.5 * dt * k1);
    double k3 = rhs(v + 0.5 * dt * k2);
    double k4 = rhs(v + dt * k3);
    v = v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    v = std::max(v, 0.0);
    t = (i + 1) * dt;
    trace.values.push_back(v);
    if (v <= kHitLevel) {
      trace.hit_time = t;
      break;
    }
    if (!std::isfinite(v)) break;
  }
  return trace;
}

}  // namespace fxts::sim
