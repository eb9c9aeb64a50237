#pragma once

#include "fxts/clf.hpp"
#include "fxts/core.hpp"

#include <optional>
#include <vector>

namespace fxts::sim {

// One closed-loop (or open-loop) run. Rows are sampled on the fixed dt grid;
// when the run stops at the goal a bisection-refined event point is appended,
// which is the only row off the grid.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> inputs;
  std::vector<double> delta1_values;  // NaN on open-loop rows
  std::vector<double> h_values;
  std::optional<double> goal_entry_time;
  double input_norm_max = 0.0;  // max |u|_inf over rows
  bool diverged = false;
  int infeasible_holds = 0;  // steps inside S_G served by zero-order hold

  double max_delta1() const;
  size_t size() const { return times.size(); }
};

struct SimOptions {
  double dt = 1e-3;
  double t_end = 10.0;
  double post_entry_time = 0.0;    // keep integrating this long after entry
  double divergence_norm = 1e6;    // abort when |x| exceeds this
};

// Classical RK4 with the control held constant over each step (one QP solve
// per step, at the step's start state).
Trajectory simulate(const SystemModel& model, const GoalSpec& goal, const clf::ClfQpConfig& config,
                    const Vector& x0, const SimOptions& options);

// Same grid and event handling with u = 0 throughout.
Trajectory simulate_open_loop(const SystemModel& model, const GoalSpec& goal, const Vector& x0,
                              const SimOptions& options);

struct VTrace {
  double dt = 0.0;
  std::vector<double> values;        // V at i*dt
  std::optional<double> hit_time;    // first grid time with V <= 1e-9
};

// Integrates the scalar comparison system dV/dt = -a1 V^g1 - a2 V^g2 + d1 V
// with RK4, clamping V at zero (the field is non-Lipschitz there and the true
// solution is absorbed). t_end <= 0 selects a default horizon slightly past
// the settling bound at k = 0.99.
VTrace simulate_v_ode(const FxtsGains& gains, double v0, double dt, double t_end = 0.0);

}  // namespace fxts::sim
