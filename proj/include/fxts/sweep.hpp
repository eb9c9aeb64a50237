#pragma once

#include "fxts/core.hpp"
#include "fxts/sim.hpp"

#include <optional>
#include <vector>

namespace fxts::sweep {

// Serial is the reference path; Parallel distributes sweep points over OpenMP
// threads. Records are written by point index, so both modes produce
// identical output.
enum class ExecutionMode { Serial, Parallel };

struct SweepPoint {
  double u_max;
  double t_budget;
};

struct SweepRecord {
  SweepPoint point;
  double max_delta1 = 0.0;
  std::optional<double> goal_entry_time;
  double input_norm_max = 0.0;
  bool diverged = false;
};

struct SweepProblem {
  SystemModel model;
  GoalSpec goal;
  Vector x0;
  double mu = 2.0;
  Vector p_u;
  double p1 = 100.0;
  double q1 = 1000.0;
  double dt = 1e-3;
  double t_end = 0.0;  // <= 0: ten budgets per point
};

// One closed-loop run per point; each worker owns its controller and solver.
std::vector<SweepRecord> run(const SweepProblem& problem, const std::vector<SweepPoint>& points,
                             ExecutionMode mode);

std::vector<double> linspace(double lo, double hi, int count);

}  // namespace fxts::sweep
