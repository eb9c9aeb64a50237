#include "fxts/qp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/LU>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fxts::qp {

namespace {

constexpr double kActiveListTol = 1e-6;  // reporting tolerance for active_set
constexpr double kStepTol = 1e-11;       // step below which the iterate sits at the EQP minimizer
// curvature anchoring z in the phase-1 slack problem; the re-anchoring loop
// shrinks the proximal bias by eps/(1+eps) per round, so a handful of rounds
// reach machine level while S stays well conditioned
constexpr double kProxEps = 1e-4;

double row_tol(double bi, double tol) { return tol * (1.0 + std::abs(bi)); }

bool primal_feasible(const QpProblem& p, const Vector& z, double tol) {
  for (int i = 0; i < p.num_constraints(); ++i) {
    if (p.A.row(i).dot(z) - p.b[i] > row_tol(p.b[i], tol)) return false;
  }
  return true;
}

double max_violation(const QpProblem& p, const Vector& z) {
  double v = 0.0;
  for (int i = 0; i < p.num_constraints(); ++i) {
    v = std::max(v, p.A.row(i).dot(z) - p.b[i]);
  }
  return v;
}

std::vector<int> list_active(const QpProblem& p, const Vector& z) {
  std::vector<int> idx;
  for (int i = 0; i < p.num_constraints(); ++i) {
    if (std::abs(p.A.row(i).dot(z) - p.b[i]) <= row_tol(p.b[i], kActiveListTol)) idx.push_back(i);
  }
  return idx;
}

QpSolution make_optimal(const QpProblem& p, Vector z, const std::vector<int>& working,
                        const Vector& lambda, int iterations) {
  QpSolution sol;
  sol.status = QpStatus::Optimal;
  sol.duals = Vector::Zero(p.num_constraints());
  for (size_t i = 0; i < working.size(); ++i) sol.duals[working[i]] = lambda[static_cast<int>(i)];
  sol.active_set = list_active(p, z);
  sol.z = std::move(z);
  sol.iterations = iterations;
  return sol;
}

struct EqpResult {
  Vector z;
  Vector lambda;
  bool ok = false;
};

// min 1/2 z'Hz + F'z s.t. A_W z = b_W, via the Schur complement of the
// Cholesky factorization of H on the working rows, with iterative refinement.
EqpResult solve_eqp(const Eigen::LLT<Matrix>& hllt, const Matrix& H, const Vector& F,
                    const Matrix& A, const Vector& b, const std::vector<int>& working) {
  EqpResult res;
  const int k = static_cast<int>(working.size());
  Vector z_uc = hllt.solve(-F);
  if (k == 0) {
    res.z = std::move(z_uc);
    res.lambda.resize(0);
    res.ok = true;
    return res;
  }
  Matrix Aw(k, A.cols());
  Vector bw(k);
  for (int i = 0; i < k; ++i) {
    Aw.row(i) = A.row(working[static_cast<size_t>(i)]);
    bw[i] = b[working[static_cast<size_t>(i)]];
  }
  Matrix HinvAt = hllt.solve(Aw.transpose());
  Matrix S = Aw * HinvAt;
  Vector rhs = Aw * z_uc - bw;
  // rank-revealing solve: duplicated or nearly parallel working rows give a
  // singular S with a consistent rhs, where the minimum-norm multipliers are
  // still valid; a residual large against the backward-error scale means the
  // rows are genuinely inconsistent
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(S);
  Vector lambda = cod.solve(rhs);
  double resid = (S * lambda - rhs).lpNorm<Eigen::Infinity>();
  double scale = 1.0 + rhs.lpNorm<Eigen::Infinity>() +
                 S.lpNorm<Eigen::Infinity>() * lambda.lpNorm<Eigen::Infinity>();
  if (!lambda.allFinite() || resid > 1e-10 * scale) return res;
  Vector z = z_uc - HinvAt * lambda;

  // refinement passes keep the working rows tight when the decrease row
  // carries values many orders above the input rows
  for (int pass = 0; pass < 2; ++pass) {
    Vector r_stat = -(H * z + F + Aw.transpose() * lambda);
    Vector r_prim = bw - Aw * z;
    Vector t = hllt.solve(r_stat);
    Vector dl = cod.solve(Aw * t - r_prim);
    Vector dz = t - HinvAt * dl;
    if (!dz.allFinite() || !dl.allFinite()) break;
    z += dz;
    lambda += dl;
  }

  res.z = std::move(z);
  res.lambda = std::move(lambda);
  res.ok = true;
  return res;
}

}  // namespace

QpProblem::QpProblem(Matrix H_in, Vector F_in, Matrix A_in, Vector b_in)
    : H(std::move(H_in)), F(std::move(F_in)), A(std::move(A_in)), b(std::move(b_in)) {
  const auto d = H.rows();
  if (H.cols() != d) throw std::invalid_argument("H must be square");
  if (F.size() != d) throw std::invalid_argument("F has wrong dimension");
  if (A.rows() != b.size()) throw std::invalid_argument("rows(A) != size(b)");
  if (A.rows() > 0 && A.cols() != d) throw std::invalid_argument("A has wrong column count");
  double hscale = std::max(1.0, H.lpNorm<Eigen::Infinity>());
  if ((H - H.transpose()).lpNorm<Eigen::Infinity>() > 1e-12 * hscale) {
    throw std::invalid_argument("H is not symmetric within 1e-12");
  }
  if (Eigen::LLT<Matrix>(H).info() != Eigen::Success) {
    throw std::invalid_argument("H is not positive definite (Cholesky failed)");
  }
}

double KktResiduals::max() const {
  return std::max(std::max(stationarity, primal), std::max(comp_slack, dual_neg));
}

KktResiduals kkt_residuals(const QpProblem& problem, const QpSolution& solution) {
  if (solution.status != QpStatus::Optimal) {
    throw std::invalid_argument("kkt_residuals requires an Optimal solution");
  }
  const Vector& z = solution.z;
  KktResiduals res{0.0, 0.0, 0.0, 0.0};
  Vector stat = problem.H * z + problem.F;
  if (problem.num_constraints() > 0) stat += problem.A.transpose() * solution.duals;
  res.stationarity = stat.lpNorm<Eigen::Infinity>();
  for (int i = 0; i < problem.num_constraints(); ++i) {
    double slack = problem.A.row(i).dot(z) - problem.b[i];
    res.primal = std::max(res.primal, slack);
    res.comp_slack = std::max(res.comp_slack, std::abs(solution.duals[i] * slack));
    res.dual_neg = std::max(res.dual_neg, -solution.duals[i]);
  }
  res.primal = std::max(res.primal, 0.0);
  res.dual_neg = std::max(res.dual_neg, 0.0);
  return res;
}

QpSolution ActiveSetSolver::run_phase2(const QpProblem& problem, Vector z,
                                       std::vector<int> working) {
  const int d = problem.dim();
  const int nc = problem.num_constraints();
  Eigen::LLT<Matrix> hllt(problem.H);
  const long maxit = d + 64 + ((nc < 20) ? (1L << nc) : 1'000'000L);

  std::vector<char> in_working(static_cast<size_t>(nc), 0);
  for (int i : working) in_working[static_cast<size_t>(i)] = 1;

  for (long iter = 1; iter <= maxit; ++iter) {
    EqpResult step = solve_eqp(hllt, problem.H, problem.F, problem.A, problem.b, working);
    if (!step.ok) throw std::runtime_error("active-set step failed: degenerate working set");

    Vector p = step.z - z;
    double scale = 1.0 + z.lpNorm<Eigen::Infinity>();
    if (p.lpNorm<Eigen::Infinity>() <= kStepTol * scale) {
      // at the working-set minimizer; leave if some multiplier is negative
      int drop = -1;
      double most_negative = -kDualTol;
      for (int i = 0; i < static_cast<int>(working.size()); ++i) {
        if (step.lambda[i] < most_negative) {
          most_negative = step.lambda[i];
          drop = i;
        }
      }
      if (drop < 0) return make_optimal(problem, step.z, working, step.lambda, static_cast<int>(iter));
      in_working[static_cast<size_t>(working[static_cast<size_t>(drop)])] = 0;
      working.erase(working.begin() + drop);
      continue;
    }

    // longest step toward the EQP minimizer that stays feasible
    double alpha = 1.0;
    int blocker = -1;
    for (int i = 0; i < nc; ++i) {
      if (in_working[static_cast<size_t>(i)]) continue;
      double s = problem.A.row(i).dot(p);
      if (s <= 1e-13 * (1.0 + std::abs(s))) continue;
      double gap = problem.b[i] - problem.A.row(i).dot(z);
      double ai = std::max(gap, 0.0) / s;
      if (ai < alpha) {  // strict: first (lowest) index wins ties
        alpha = ai;
        blocker = i;
      }
    }
    z += alpha * p;
    if (blocker >= 0) {
      working.push_back(blocker);
      in_working[static_cast<size_t>(blocker)] = 1;
    }
  }
  throw std::runtime_error("active-set solver exceeded its iteration bound");
}

QpSolution ActiveSetSolver::solve(const QpProblem& problem, std::span<const int> warm_active,
                                  const Vector* feasible_hint) {
  const int nc = problem.num_constraints();
  if (nc == 0) return solve_scaled(problem, warm_active, feasible_hint);

  // equilibrate the rows: along a diverging trajectory the decrease row can
  // outweigh the input rows by many orders of magnitude
  Matrix A_s = problem.A;
  Vector b_s = problem.b;
  Vector row_scale(nc);
  for (int i = 0; i < nc; ++i) {
    double rn = A_s.row(i).lpNorm<Eigen::Infinity>();
    row_scale[i] = rn > 0.0 ? rn : 1.0;
    A_s.row(i) /= row_scale[i];
    b_s[i] /= row_scale[i];
  }
  QpSolution sol = solve_scaled(QpProblem(problem.H, problem.F, std::move(A_s), std::move(b_s)),
                                warm_active, feasible_hint);
  if (sol.duals.size() == nc) {
    for (int i = 0; i < nc; ++i) sol.duals[i] /= row_scale[i];
  }
  return sol;
}

QpSolution ActiveSetSolver::solve_scaled(const QpProblem& problem, std::span<const int> warm_active,
                                         const Vector* feasible_hint) {
  const int d = problem.dim();
  const int nc = problem.num_constraints();
  Eigen::LLT<Matrix> hllt(problem.H);
  Vector z_uc = hllt.solve(-problem.F);

  if (nc == 0) return make_optimal(problem, z_uc, {}, Vector(0), 0);

  // seed with the caller's working set: one equality solve certifies or rejects
  if (!warm_active.empty()) {
    std::vector<int> seed;
    for (int i : warm_active) {
      if (i >= 0 && i < nc && std::find(seed.begin(), seed.end(), i) == seed.end()) {
        seed.push_back(i);
      }
    }
    if (!seed.empty() && static_cast<int>(seed.size()) <= d) {
      EqpResult r = solve_eqp(hllt, problem.H, problem.F, problem.A, problem.b, seed);
      if (r.ok && (r.lambda.size() == 0 || r.lambda.minCoeff() >= -kDualTol) &&
          primal_feasible(problem, r.z, kFeasTol)) {
        return make_optimal(problem, r.z, seed, r.lambda, 1);
      }
    }
  }

  if (primal_feasible(problem, z_uc, kFeasTol)) return make_optimal(problem, z_uc, {}, Vector(0), 1);

  Vector start;
  bool have_start = false;
  if (feasible_hint && feasible_hint->size() == d && primal_feasible(problem, *feasible_hint, kFeasTol)) {
    start = *feasible_hint;
    have_start = true;
  }

  if (!have_start) {
    // Phase 1: minimize 1/2 t^2 + (eps/2)|z - c|^2 over A z - t 1 <= b, t >= 0,
    // re-anchoring c at the previous solution until the proximal bias is gone.
    Matrix H1 = Matrix::Zero(d + 1, d + 1);
    H1.topLeftCorner(d, d) = kProxEps * Matrix::Identity(d, d);
    H1(d, d) = 1.0;
    Matrix A1(nc + 1, d + 1);
    A1.topLeftCorner(nc, d) = problem.A;
    A1.topRightCorner(nc, 1) = -Vector::Ones(nc);
    A1.row(nc).setZero();
    A1(nc, d) = -1.0;
    Vector b1(nc + 1);
    b1.head(nc) = problem.b;
    b1[nc] = 0.0;

    Vector center = z_uc;
    Vector zs = z_uc;
    double t_final = 0.0;
    Vector duals_final = Vector::Zero(nc);
    bool feasible_found = false;
    const double t_accept = kFeasTol * (1.0 + problem.b.lpNorm<Eigen::Infinity>());

    for (int round = 0; round < 64; ++round) {
      Vector F1(d + 1);
      F1.head(d) = -kProxEps * center;
      F1[d] = 0.0;
      QpProblem phase1(H1, F1, A1, b1);

      Vector start1(d + 1);
      start1.head(d) = center;
      start1[d] = max_violation(problem, center) * (1.0 + 1e-9) + 1e-9;
      QpSolution sol1 = run_phase2(phase1, start1, {});

      zs = sol1.z.head(d);
      t_final = sol1.z[d];
      duals_final = sol1.duals.head(nc);
      if (max_violation(problem, zs) <= t_accept) {
        feasible_found = true;
        break;
      }
      double moved = (zs - center).lpNorm<Eigen::Infinity>();
      center = zs;
      if (moved <= 1e-10 * (1.0 + center.lpNorm<Eigen::Infinity>())) break;  // converged violated
    }

    if (!feasible_found) {
      QpSolution sol;
      sol.status = QpStatus::Infeasible;
      sol.z = zs;
      sol.duals = Vector::Zero(nc);
      sol.active_set.clear();
      Vector y = duals_final;
      double aty = (problem.A.transpose() * y).lpNorm<Eigen::Infinity>();
      double bty = problem.b.dot(y);
      std::ostringstream os;
      os << "phase-1 slack stalled at t = " << t_final << "; Farkas-style evidence: y >= 0 with |A'y|_inf = "
         << aty << ", b'y = " << bty;
      sol.note = os.str();
      return sol;
    }
    start = zs;
  }

  return run_phase2(problem, start, {});
}

namespace {

// KKT enumeration over every constraint subset of size <= dim. Returns false
// when no subset passes the feasibility and dual-sign filters.
bool enumerate_best(const QpProblem& problem, QpSolution* best) {
  const int d = problem.dim();
  const int nc = problem.num_constraints();
  constexpr double kTol = 1e-9;

  bool found = false;
  double best_obj = std::numeric_limits<double>::infinity();

  for (unsigned mask = 0; mask < (1u << nc); ++mask) {
    int k = std::popcount(mask);
    if (k > d) continue;
    Matrix kkt = Matrix::Zero(d + k, d + k);
    kkt.topLeftCorner(d, d) = problem.H;
    Vector rhs(d + k);
    rhs.head(d) = -problem.F;
    std::vector<int> subset;
    int row = 0;
    for (int i = 0; i < nc; ++i) {
      if (!(mask & (1u << i))) continue;
      kkt.block(d + row, 0, 1, d) = problem.A.row(i);
      kkt.block(0, d + row, d, 1) = problem.A.row(i).transpose();
      rhs[d + row] = problem.b[i];
      subset.push_back(i);
      ++row;
    }
    Eigen::FullPivLU<Matrix> lu(kkt);
    if (!lu.isInvertible()) continue;
    Vector sol = lu.solve(rhs);
    Vector z = sol.head(d);
    Vector lambda = sol.tail(k);
    if (k > 0 && lambda.minCoeff() < -kTol) continue;
    if (!primal_feasible(problem, z, kTol)) continue;
    double obj = problem.objective(z);
    if (!found || obj < best_obj - 1e-12 * (1.0 + std::abs(best_obj))) {
      found = true;
      best_obj = obj;
      *best = make_optimal(problem, z, subset, lambda, 0);
    }
  }
  return found;
}

}  // namespace

QpSolution enumerate_oracle(const QpProblem& problem_in) {
  const int d = problem_in.dim();
  const int nc = problem_in.num_constraints();
  if (nc > 12) throw std::invalid_argument("enumerate_oracle supports at most 12 constraints");

  // same row equilibration as the solver
  Matrix A_s = problem_in.A;
  Vector b_s = problem_in.b;
  Vector row_scale = Vector::Ones(nc);
  for (int i = 0; i < nc; ++i) {
    double rn = A_s.row(i).lpNorm<Eigen::Infinity>();
    row_scale[i] = rn > 0.0 ? rn : 1.0;
    A_s.row(i) /= row_scale[i];
    b_s[i] /= row_scale[i];
  }
  QpProblem problem(problem_in.H, problem_in.F, std::move(A_s), std::move(b_s));

  QpSolution best;
  if (enumerate_best(problem, &best)) {
    for (int i = 0; i < nc; ++i) best.duals[i] /= row_scale[i];
    return best;
  }

  // no KKT candidate: confirm emptiness on the slack reformulation with the
  // same enumeration, re-anchoring as in the solver's phase 1
  Eigen::LLT<Matrix> hllt(problem.H);
  Vector center = hllt.solve(-problem.F);
  Vector zs = center;
  double t_final = 0.0;
  const double t_accept = 1e-9 * (1.0 + problem.b.lpNorm<Eigen::Infinity>());

  Matrix H1 = Matrix::Zero(d + 1, d + 1);
  H1.topLeftCorner(d, d) = kProxEps * Matrix::Identity(d, d);
  H1(d, d) = 1.0;
  Matrix A1(nc + 1, d + 1);
  A1.topLeftCorner(nc, d) = problem.A;
  A1.topRightCorner(nc, 1) = -Vector::Ones(nc);
  A1.row(nc).setZero();
  A1(nc, d) = -1.0;
  Vector b1(nc + 1);
  b1.head(nc) = problem.b;
  b1[nc] = 0.0;

  for (int round = 0; round < 64; ++round) {
    Vector F1(d + 1);
    F1.head(d) = -kProxEps * center;
    F1[d] = 0.0;
    QpSolution sol1;
    if (!enumerate_best(QpProblem(H1, F1, A1, b1), &sol1)) {
      throw std::runtime_error("slack reformulation must be solvable");
    }
    zs = sol1.z.head(d);
    t_final = sol1.z[d];
    if (max_violation(problem, zs) <= t_accept) {
      throw std::runtime_error("oracle inconsistency: feasible point exists but no KKT subset passed");
    }
    double moved = (zs - center).lpNorm<Eigen::Infinity>();
    center = zs;
    if (moved <= 1e-10 * (1.0 + center.lpNorm<Eigen::Infinity>())) break;
  }

  QpSolution sol;
  sol.status = QpStatus::Infeasible;
  sol.z = zs;
  sol.duals = Vector::Zero(nc);
  std::ostringstream os;
  os << "enumeration found no KKT point; slack minimum stalled at t = " << t_final;
  sol.note = os.str();
  return sol;
}

}  // namespace fxts::qp
