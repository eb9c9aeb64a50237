// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Heavy draw loops pre-generate their inputs and fan out over OpenMP.

#include "fxts/case_study.hpp"
#include "fxts/cert.hpp"
#include "fxts/clf.hpp"
#include "fxts/sim.hpp"
#include "fxts/sweep.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace fxts;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %d. %s — %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  if (!pass) ++g_failures;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

clf::ClfQpConfig paper_config(double u_max, double t_budget) {
  return clf::ClfQpConfig::from_time_budget(2.0, t_budget, Vector::Ones(1), 100.0, 1000.0,
                                            InputConstraintSet::box(1, u_max));
}

// --- criterion 1: Lemma 2 bound dominance on 1000 draws, < 10 s ---------

void criterion_1() {
  Timer timer;
  const int n = 1000;
  const double ks[] = {0.3, 0.6, 0.9};

  struct Draw {
    double a1, a2, d1, mu, k, v0;
  };
  std::vector<Draw> draws(n);
  std::mt19937_64 rng(20240001);
  std::uniform_real_distribution<double> a_d(0.1, 10.0);
  std::uniform_real_distribution<double> mu_d(1.0 + 1e-3, 5.0);
  std::uniform_real_distribution<double> r_d(-2.0, 3.0);
  std::uniform_real_distribution<double> v_exp(-2.0, 2.0);
  std::uniform_real_distribution<double> frac(0.05, 1.0);
  for (int i = 0; i < n; ++i) {
    Draw d;
    d.a1 = a_d(rng);
    d.a2 = a_d(rng);
    d.mu = mu_d(rng);
    d.k = ks[static_cast<size_t>(i) % 3];
    double r = r_d(rng);
    d.d1 = r * 2.0 * std::sqrt(d.a1 * d.a2);
    FxtsGains g(d.a1, d.a2, d.d1, d.mu);
    if (g.r >= 1.0) {
      cert::CriticalLevels lv = cert::critical_levels(g);
      d.v0 = std::pow(d.k * *lv.v1 * frac(rng), d.mu);
    } else {
      d.v0 = std::pow(10.0, v_exp(rng));
    }
    draws[static_cast<size_t>(i)] = d;
  }

  int violations = 0;
  double worst_margin = 1e300;
#pragma omp parallel for schedule(dynamic) reduction(+ : violations) reduction(min : worst_margin)
  for (int i = 0; i < n; ++i) {
    const Draw& d = draws[static_cast<size_t>(i)];
    FxtsGains g(d.a1, d.a2, d.d1, d.mu);
    double oracle = cert::integral_oracle(g, d.v0);
    double bound = cert::integral_bound(g, d.v0, d.k);
    if (!(oracle <= bound * (1.0 + 1e-9))) ++violations;
    worst_margin = std::min(worst_margin, bound - oracle);
  }

  double secs = timer.seconds();
  char detail[160];
  std::snprintf(detail, sizeof(detail), "%d draws, %d violations, min slack %.3g, %.2f s", n,
                violations, worst_margin, secs);
  report(1, "Lemma 2 bound dominance", violations == 0 && secs < 10.0, detail);
}

// --- criterion 2: settling soundness of the comparison system -----------

void criterion_2() {
  Timer timer;
  const int n = 200;
  const double dt = 1e-4;
  const double ks[] = {0.3, 0.6, 0.9};

  struct Draw {
    double a1, a2, d1, mu, k, v0;
  };
  std::vector<Draw> draws(n);
  std::mt19937_64 rng(20240002);
  std::uniform_real_distribution<double> a_d(0.3, 3.0);
  std::uniform_real_distribution<double> mu_d(1.2, 4.0);
  std::uniform_real_distribution<double> r_sub(-1.0, 0.9);
  std::uniform_real_distribution<double> r_super(1.0, 3.0);
  std::uniform_real_distribution<double> v_d(0.01, 10.0);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  for (int i = 0; i < n; ++i) {
    Draw d;
    d.a1 = a_d(rng);
    d.a2 = a_d(rng);
    d.mu = mu_d(rng);
    d.k = ks[static_cast<size_t>(i) % 3];
    bool super = i % 4 == 0;
    double root = std::sqrt(d.a1 * d.a2);
    d.d1 = (super ? r_super(rng) : r_sub(rng)) * 2.0 * root;
    FxtsGains g(d.a1, d.a2, d.d1, d.mu);
    d.v0 = g.r >= 1.0 ? cert::domain_level(g, d.k) * frac(rng) : v_d(rng);
    draws[static_cast<size_t>(i)] = d;
  }

  int late = 0, missed = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : late, missed)
  for (int i = 0; i < n; ++i) {
    const Draw& d = draws[static_cast<size_t>(i)];
    FxtsGains g(d.a1, d.a2, d.d1, d.mu);
    double bound = cert::settling_time_bound(g, d.k);
    sim::VTrace trace = sim::simulate_v_ode(g, d.v0, dt, bound + 10.0 * dt);
    if (!trace.hit_time) {
      ++missed;
    } else if (*trace.hit_time > bound + 2.0 * dt) {
      ++late;
    }
  }

  // 50 supercritical escape draws: v0^(1/mu) strictly between the roots
  int not_growing = 0;
  std::uniform_real_distribution<double> mid(0.05, 0.95);
  for (int i = 0; i < 50; ++i) {
    double a1 = a_d(rng), a2 = a_d(rng), mu = mu_d(rng);
    double d1 = r_super(rng) * 2.0 * std::sqrt(a1 * a2);
    FxtsGains g(a1, a2, d1, mu);
    cert::CriticalLevels lv = cert::critical_levels(g);
    if (*lv.v2 - *lv.v1 < 1e-9) {
      d1 = 1.5 * 2.0 * std::sqrt(a1 * a2);
      g = FxtsGains(a1, a2, d1, mu);
      lv = cert::critical_levels(g);
    }
    double s0 = *lv.v1 + (*lv.v2 - *lv.v1) * mid(rng);
    double v0 = std::pow(s0, mu);
    double rhs = -a1 * std::pow(v0, g.gamma1) - a2 * std::pow(v0, g.gamma2) + d1 * v0;
    sim::VTrace trace = sim::simulate_v_ode(g, v0, dt, 20.0 * dt);
    bool grows = rhs > 0.0 && trace.values.size() >= 2 && trace.values[1] > trace.values[0];
    if (!grows) ++not_growing;
  }

  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "%d settle draws (dt = 1e-4): %d late, %d missed; 50 escape draws: %d not growing; %.2f s",
                n, late, missed, not_growing, timer.seconds());
  report(2, "Theorem 1 settling soundness", late == 0 && missed == 0 && not_growing == 0, detail);
}

// --- criterion 3: branch continuity at delta1 -> 0+ ---------------------

void criterion_3() {
  std::mt19937_64 rng(20240003);
  std::uniform_real_distribution<double> a_d(0.1, 10.0);
  std::uniform_real_distribution<double> mu_d(1.05, 5.0);
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    double a1 = a_d(rng), a2 = a_d(rng), mu = mu_d(rng);
    double lim = mu * std::numbers::pi / (2.0 * std::sqrt(a1 * a2));
    double val = cert::settling_time_bound(FxtsGains(a1, a2, 1e-8, mu), 0.5);
    double rel = std::abs(val - lim) / lim;
    worst = std::max(worst, rel);
    if (rel > 1e-6) ++bad;
  }
  char detail[120];
  std::snprintf(detail, sizeof(detail), "20 gains, worst relative gap %.3g", worst);
  report(3, "branch continuity at delta1 = 1e-8", bad == 0, detail);
}

// --- criterion 4: QP solver vs enumeration oracle ------------------------

void criterion_4() {
  Timer timer;
  std::mt19937_64 rng(20240004);
  std::uniform_int_distribution<int> d_d(2, 5);
  std::uniform_int_distribution<int> nc_d(0, 8);
  qp::ActiveSetSolver solver;
  int mismatched = 0, residual_bad = 0;
  double worst_gap = 0.0, worst_res = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    qp::QpProblem p = testsupport::random_feasible_qp(rng, d_d(rng), nc_d(rng));
    qp::QpSolution sol = solver.solve(p);
    qp::QpSolution ref = qp::enumerate_oracle(p);
    if (sol.status != qp::QpStatus::Optimal || ref.status != qp::QpStatus::Optimal) {
      ++mismatched;
      continue;
    }
    double gap = (sol.z - ref.z).lpNorm<Eigen::Infinity>();
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-6) ++mismatched;
    qp::KktResiduals res = qp::kkt_residuals(p, sol);
    worst_res = std::max(worst_res, res.max());
    if (res.max() > 1e-7) ++residual_bad;
  }
  double secs = timer.seconds();
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "500 problems: %d disagreements (worst %.3g), %d residuals > 1e-7 (worst %.3g), %.2f s",
                mismatched, worst_gap, residual_bad, worst_res, secs);
  report(4, "QP correctness vs enumeration", mismatched == 0 && residual_bad == 0 && secs < 5.0,
         detail);
}

// --- criterion 5: Lemma 3 feasibility on the benchmark model ------------

void criterion_5() {
  Timer timer;
  SystemModel model = case_study_model();
  GoalSpec goal = case_study_goal();
  clf::ClfQpConfig config = paper_config(16.0, 1.0);

  std::vector<Vector> states;
  std::mt19937_64 rng(20240005);
  std::uniform_real_distribution<double> coord(-6.0, 6.0);
  while (static_cast<int>(states.size()) < 1000) {
    Vector x = vec2(coord(rng), coord(rng));
    if (goal.h(x) > 1e-3) states.push_back(x);
  }

  int infeasible = 0, witness_bad = 0;
#pragma omp parallel reduction(+ : infeasible, witness_bad)
  {
    qp::ActiveSetSolver solver;
#pragma omp for schedule(dynamic)
    for (int i = 0; i < 1000; ++i) {
      const Vector& x = states[static_cast<size_t>(i)];
      clf::ControlOutput out = clf::control(model, goal, config, x, solver);
      if (out.status != qp::QpStatus::Optimal) ++infeasible;

      auto [v, d1] = clf::fallback_feasible_point(model, goal, config.gains, x, Vector::Zero(1));
      qp::QpProblem p = clf::build_qp(model, goal, config, x);
      Vector z(2);
      z << v[0], d1;
      for (int row = 0; row < p.num_constraints(); ++row) {
        if (p.A.row(row).dot(z) - p.b[row] > 1e-10 * (1.0 + std::abs(p.b[row]))) ++witness_bad;
      }
    }
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "1000 states (u_max = 16): %d infeasible, %d witness violations, %.2f s", infeasible,
                witness_bad, timer.seconds());
  report(5, "Lemma 3 feasibility and witness validity", infeasible == 0 && witness_bad == 0, detail);
}

// --- criterion 6: benchmark convergence under the study weights ---------

void criterion_6() {
  clf::ClfQpConfig config = paper_config(20.0, 1.0);
  sim::SimOptions opt;
  opt.dt = 1e-3;
  opt.t_end = 10.0;
  sim::Trajectory traj = sim::simulate(case_study_model(), case_study_goal(), config,
                                       vec2(3.33, 1.33), opt);
  bool entered = traj.goal_entry_time.has_value();
  bool bounded_u = traj.input_norm_max <= 20.0 + 1e-6;
  bool within_class_bound = false;
  std::string cls_name = "n/a";
  double t_bound = 0.0;
  if (entered) {
    clf::ClosedLoopClassification cls =
        clf::classify_closed_loop(traj.delta1_values, config.gains, 0.99);
    t_bound = cls.t_bound;
    within_class_bound = *traj.goal_entry_time <= cls.t_bound;
    cls_name = cls.kind == clf::ClosedLoopCase::GlobalBudget     ? "global-budget"
               : cls.kind == clf::ClosedLoopCase::GlobalInflated ? "global-inflated"
                                                                 : "local";
  }
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "entry %s at t = %.6g, class %s, bound %.6g, max |u| = %.6g",
                entered ? "yes" : "no", entered ? *traj.goal_entry_time : -1.0, cls_name.c_str(),
                t_bound, traj.input_norm_max);
  report(6, "case-study convergence (u_max = 20, T = 1)", entered && bounded_u && within_class_bound,
         detail);
}

// --- criterion 7: sweep trends ------------------------------------------

void criterion_7() {
  sweep::SweepProblem prob{case_study_model(), case_study_goal(), vec2(3.33, 1.33), 2.0,
                           Vector::Ones(1),    100.0,             1000.0,           1e-3, 0.0};

  Timer t_umax;
  std::vector<sweep::SweepPoint> umax_points;
  for (double u : sweep::linspace(16.0, 25.0, 10)) umax_points.push_back({u, 1.0});
  auto umax_recs = sweep::run(prob, umax_points, sweep::ExecutionMode::Parallel);
  double umax_secs = t_umax.seconds();
  bool umax_monotone = true;
  for (size_t i = 0; i + 1 < umax_recs.size(); ++i) {
    umax_monotone = umax_monotone && umax_recs[i + 1].max_delta1 <= umax_recs[i].max_delta1 + 1e-9;
  }

  Timer t_T;
  std::vector<sweep::SweepPoint> t_points;
  for (double t : sweep::linspace(1.0, 10.0, 10)) t_points.push_back({16.0, t});
  auto t_recs = sweep::run(prob, t_points, sweep::ExecutionMode::Parallel);
  double t_secs = t_T.seconds();
  bool t_monotone = true;
  for (size_t i = 0; i + 1 < t_recs.size(); ++i) {
    t_monotone = t_monotone && t_recs[i + 1].max_delta1 <= t_recs[i].max_delta1 + 1e-9;
  }

  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "u_max sweep: %s in %.2f s (max_d1 %.4g..%.4g); T sweep: %s in %.2f s (%.4g..%.4g)",
                umax_monotone ? "non-increasing" : "NOT monotone", umax_secs,
                umax_recs.front().max_delta1, umax_recs.back().max_delta1,
                t_monotone ? "non-increasing" : "NOT monotone", t_secs, t_recs.front().max_delta1,
                t_recs.back().max_delta1);
  report(7, "sweep trends over u_max and T",
         umax_monotone && t_monotone && umax_secs < 60.0 && t_secs < 60.0, detail);
}

// --- criterion 8: open-loop instability ----------------------------------

void criterion_8() {
  sim::SimOptions opt;
  opt.dt = 1e-3;
  opt.t_end = 10.0;
  sim::Trajectory traj =
      sim::simulate_open_loop(case_study_model(), case_study_goal(), vec2(3.33, 1.33), opt);
  char detail[120];
  std::snprintf(detail, sizeof(detail), "diverged = %s after %zu recorded rows",
                traj.diverged ? "yes" : "no", traj.size());
  report(8, "open-loop run triggers the divergence cutoff", traj.diverged, detail);
}

// --- criterion 9: robustness pipeline ------------------------------------

void criterion_9() {
  cert::RobustnessMargin global =
      cert::robustness_margin(cert::RobustnessData(NominalFxtsGains(1, 1, 0.5, 1.5), 1.0, 1.0, 1.0));
  cert::RobustnessMargin local =
      cert::robustness_margin(cert::RobustnessData(NominalFxtsGains(1, 1, 0.5, 1.5), 4.0, 1.0, 1.0));
  double expected = 0.07179676972449088;  // (2 - sqrt 3)^2
  bool pass = global.global && std::isinf(global.domain_level) && !local.global &&
              std::abs(local.domain_level - expected) <= 1e-9;
  char detail[160];
  std::snprintf(detail, sizeof(detail), "L = 1: global = %s; L = 4: level = %.12g (want %.12g)",
                global.global ? "yes" : "no", local.domain_level, expected);
  report(9, "Corollary 1 robustness pipeline", pass, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures == 0) {
    std::printf("acceptance: all 9 criteria passed\n");
  } else {
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
  }
  return g_failures;
}
