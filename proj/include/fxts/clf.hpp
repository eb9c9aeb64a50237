#pragma once

#include "fxts/cert.hpp"
#include "fxts/core.hpp"
#include "fxts/qp.hpp"

#include <span>
#include <utility>
#include <vector>

namespace fxts::clf {

// Weights and gains of the controller program
//
//   min over (v, d1) of 1/2 (v' diag(p_u) v + p1 d1^2) + q1 d1
//   s.t.  A_u v <= b_u
//         L_f h(x) + L_g h(x) v <= d1 h(x) - a1 max(0,h)^g1 - a2 max(0,h)^g2.
struct ClfQpConfig {
  Vector p_u;
  double p1;
  double q1;
  FxtsGains gains;
  InputConstraintSet input_set;
  double time_budget;  // T-bar the gains were sized for

  ClfQpConfig(Vector p_u, double p1, double q1, FxtsGains gains, InputConstraintSet input_set,
              double time_budget);

  // alpha1 = alpha2 = mu pi / (2 T-bar), the sizing that makes the unrelaxed
  // bound meet the budget exactly.
  static ClfQpConfig from_time_budget(double mu, double time_budget, Vector p_u, double p1,
                                      double q1, InputConstraintSet input_set);
};

struct ControlOutput {
  Vector u;             // v*
  double delta1_star;   // last component of z*
  qp::QpStatus status;
  std::vector<int> active_set;
};

// Assembles the program at state x. Decision vector z = (v, d1), rows are the
// input polytope extended by a zero column, then the single decrease row
// [L_g h, -h] z <= -L_f h - a1 max(0,h)^g1 - a2 max(0,h)^g2.
qp::QpProblem build_qp(const SystemModel& model, const GoalSpec& goal, const ClfQpConfig& config,
                       const Vector& x);

// The constructive feasible pair (v_bar, d1_bar) with
//   d1_bar = (L_f h + L_g h v_bar + a1 h^g1 + a2 h^g2) / h,
// valid for h(x) > 0. Used as a phase-1 starting point and as a feasibility
// witness in tests.
std::pair<Vector, double> fallback_feasible_point(const SystemModel& model, const GoalSpec& goal,
                                                  const FxtsGains& gains, const Vector& x,
                                                  const Vector& v_bar);

// One QP evaluation at x. Outside the goal set the program is feasible by
// construction, so Infeasible can only be reported inside S_G.
ControlOutput control(const SystemModel& model, const GoalSpec& goal, const ClfQpConfig& config,
                      const Vector& x, qp::ActiveSetSolver& solver,
                      std::span<const int> warm_start = {});

// Convenience wrapper owning its solver and carrying the active set from one
// call to the next.
class Controller {
 public:
  Controller(SystemModel model, GoalSpec goal, ClfQpConfig config);

  ControlOutput operator()(const Vector& x);
  void reset();

  const ClfQpConfig& config() const { return config_; }
  const SystemModel& model() const { return model_; }
  const GoalSpec& goal() const { return goal_; }

 private:
  SystemModel model_;
  GoalSpec goal_;
  ClfQpConfig config_;
  qp::ActiveSetSolver solver_;
  std::vector<int> warm_;
};

enum class ClosedLoopCase {
  GlobalBudget,    // max d1* <= 0: the budget T-bar itself holds globally
  GlobalInflated,  // max d1* < 2 sqrt(a1 a2): global, inflated bound
  Local,           // otherwise: bounded domain of attraction
};

struct ClosedLoopClassification {
  ClosedLoopCase kind;
  double r_M;           // max(trace) / (2 sqrt(a1 a2))
  double t_bound;
  double domain_level;  // +inf for the global cases
  bool mixed_regimes;   // Local trace with entries on both sides of delta_star
};

// Classifies a realized d1* trace. k feeds the r >= 1 time bound.
ClosedLoopClassification classify_closed_loop(std::span<const double> delta1_trace,
                                              const FxtsGains& gains, double k);

}  // namespace fxts::clf
