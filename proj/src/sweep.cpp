#include "fxts/sweep.hpp"

#include "fxts/clf.hpp"

#include <stdexcept>

namespace fxts::sweep {

namespace {

SweepRecord run_point(const SweepProblem& problem, const SweepPoint& point) {
  clf::ClfQpConfig config = clf::ClfQpConfig::from_time_budget(
      problem.mu, point.t_budget, problem.p_u, problem.p1, problem.q1,
      InputConstraintSet::box(static_cast<int>(problem.p_u.size()), point.u_max));

  sim::SimOptions options;
  options.dt = problem.dt;
  options.t_end = problem.t_end > 0.0 ? problem.t_end : 10.0 * point.t_budget;

  sim::Trajectory traj = sim::simulate(problem.model, problem.goal, config, problem.x0, options);

  SweepRecord rec;
  rec.point = point;
  rec.max_delta1 = traj.max_delta1();
  rec.goal_entry_time = traj.goal_entry_time;
  rec.input_norm_max = traj.input_norm_max;
  rec.diverged = traj.diverged;
  return rec;
}

}  // namespace

std::vector<SweepRecord> run(const SweepProblem& problem, const std::vector<SweepPoint>& points,
                             ExecutionMode mode) {
  std::vector<SweepRecord> records(points.size());
  const int n = static_cast<int>(points.size());

  if (mode == ExecutionMode::Serial) {
    for (int i = 0; i < n; ++i) {
      records[static_cast<size_t>(i)] = run_point(problem, points[static_cast<size_t>(i)]);
    }
    return records;
  }

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    records[static_cast<size_t>(i)] = run_point(problem, points[static_cast<size_t>(i)]);
  }
  return records;
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count <= 0) throw std::invalid_argument("linspace needs a positive count");
  std::vector<double> v(static_cast<size_t>(count));
  if (count == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < count; ++i) {
    v[static_cast<size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  return v;
}

}  // namespace fxts::sweep
