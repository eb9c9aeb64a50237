#pragma once

#include "fxts/core.hpp"

#include <span>
#include <string>
#include <vector>

namespace fxts::qp {

// Dense strictly convex program
//   min over z of 1/2 z'Hz + F'z   s.t.   A z <= b,
// with H symmetric positive definite. Construction validates symmetry
// (componentwise within 1e-12 of the scale of H), positive definiteness
// (Cholesky must succeed) and dimension consistency.
struct QpProblem {
  Matrix H;
  Vector F;
  Matrix A;
  Vector b;

  QpProblem(Matrix H, Vector F, Matrix A, Vector b);

  int dim() const { return static_cast<int>(H.rows()); }
  int num_constraints() const { return static_cast<int>(A.rows()); }
  double objective(const Vector& z) const { return 0.5 * z.dot(H * z) + F.dot(z); }
};

enum class QpStatus { Optimal, Infeasible };

struct QpSolution {
  QpStatus status = QpStatus::Infeasible;
  Vector z;
  Vector duals;                 // size n_c, zero off the working set
  std::vector<int> active_set;  // rows satisfied with equality at z
  int iterations = 0;
  std::string note;             // Farkas-style evidence when infeasible
};

struct KktResiduals {
  double stationarity;  // |Hz + F + A'duals|_inf
  double primal;        // max(0, max_i a_i'z - b_i)
  double comp_slack;    // max_i |dual_i (a_i'z - b_i)|
  double dual_neg;      // max(0, max_i -dual_i)
  double max() const;
};

// Residuals of the KKT system at an Optimal solution.
KktResiduals kkt_residuals(const QpProblem& problem, const QpSolution& solution);

// Primal active-set solver. One constraint enters or leaves the working set
// per iteration; ties are broken by lowest row index, so runs are
// deterministic. Feasibility is established by a phase-1 slack minimization
// run through the same iteration core. Instances hold mutable workspace; use
// one instance per thread.
class ActiveSetSolver {
 public:
  // warm_active seeds the working set (typically the previous solve's active
  // set along a trajectory). feasible_hint, when given and feasible, replaces
  // the phase-1 run as the starting point. Constraint rows are equilibrated
  // to unit inf-norm internally; reported duals refer to the original rows.
  QpSolution solve(const QpProblem& problem, std::span<const int> warm_active = {},
                   const Vector* feasible_hint = nullptr);

  static constexpr double kFeasTol = 1e-9;    // constraint violation allowance
  static constexpr double kDualTol = 1e-10;   // dual nonnegativity allowance

 private:
  QpSolution solve_scaled(const QpProblem& problem, std::span<const int> warm_active,
                          const Vector* feasible_hint);
  QpSolution run_phase2(const QpProblem& problem, Vector z, std::vector<int> working);
};

// Brute-force reference: solves the equality-constrained KKT system for every
// subset of constraints of size <= dim, keeps primal-feasible dual-nonnegative
// candidates and returns the one with least objective. Emptiness is confirmed
// by the same enumeration on a slack reformulation. Requires n_c <= 12.
QpSolution enumerate_oracle(const QpProblem& problem);

}  // namespace fxts::qp
