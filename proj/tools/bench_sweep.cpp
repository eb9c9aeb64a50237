// Times the sweep engine in serial and OpenMP mode on the benchmark study and
// checks that both modes produce identical records.

#include "fxts/case_study.hpp"
#include "fxts/report.hpp"
#include "fxts/sweep.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

using namespace fxts;

namespace {

double time_run(const sweep::SweepProblem& problem, const std::vector<sweep::SweepPoint>& points,
                sweep::ExecutionMode mode, std::vector<sweep::SweepRecord>* out) {
  auto t0 = std::chrono::steady_clock::now();
  *out = sweep::run(problem, points, mode);
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  double dt = argc > 2 ? std::atof(argv[2]) : 2e-4;

  sweep::SweepProblem problem{case_study_model(), case_study_goal(), Vector(2), 2.0,
                              Vector::Ones(1),    100.0,             1000.0,    dt, 0.0};
  problem.x0 << 3.33, 1.33;

  std::vector<sweep::SweepPoint> points;
  for (double u : sweep::linspace(16.0, 25.0, 10)) points.push_back({u, 1.0});
  for (double t : sweep::linspace(1.0, 10.0, 10)) points.push_back({16.0, t});

  std::printf("sweep benchmark: %zu points, dt = %g, %d repetitions, %d threads\n", points.size(),
              dt, reps, omp_get_max_threads());

  std::vector<sweep::SweepRecord> serial, parallel;
  double best_serial = 1e300, best_parallel = 1e300;
  for (int r = 0; r < reps; ++r) {
    best_serial = std::min(best_serial, time_run(problem, points, sweep::ExecutionMode::Serial, &serial));
    best_parallel =
        std::min(best_parallel, time_run(problem, points, sweep::ExecutionMode::Parallel, &parallel));
  }

  bool identical = serial.size() == parallel.size();
  for (size_t i = 0; identical && i < serial.size(); ++i) {
    identical = serial[i].max_delta1 == parallel[i].max_delta1 &&
                serial[i].diverged == parallel[i].diverged &&
                serial[i].input_norm_max == parallel[i].input_norm_max &&
                serial[i].goal_entry_time == parallel[i].goal_entry_time;
  }

  std::printf("  serial   : %8.3f ms\n", best_serial * 1e3);
  std::printf("  parallel : %8.3f ms\n", best_parallel * 1e3);
  std::printf("  speedup  : %.2fx\n", best_serial / best_parallel);
  std::printf("  identical results: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
