#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fxts/qp.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace fxts;
using namespace fxts::qp;

namespace {

QpProblem unconstrained_2d() {
  Matrix H = Matrix::Identity(2, 2);
  Vector F(2);
  F << -1.0, -1.0;
  return QpProblem(H, F, Matrix(0, 2), Vector(0));
}

}  // namespace

TEST_CASE("problem validation") {
  Matrix H(2, 2);
  H << 1, 0.5, 0.5, 1;
  CHECK_NOTHROW(QpProblem(H, Vector::Zero(2), Matrix(0, 2), Vector(0)));

  Matrix asym(2, 2);
  asym << 1, 0.5, 0.2, 1;
  CHECK_THROWS_WITH_AS(QpProblem(asym, Vector::Zero(2), Matrix(0, 2), Vector(0)),
                       doctest::Contains("symmetric"), std::invalid_argument);

  Matrix indef(2, 2);
  indef << 1, 0, 0, -1;
  CHECK_THROWS_WITH_AS(QpProblem(indef, Vector::Zero(2), Matrix(0, 2), Vector(0)),
                       doctest::Contains("positive definite"), std::invalid_argument);

  CHECK_THROWS_AS(QpProblem(H, Vector::Zero(3), Matrix(0, 2), Vector(0)), std::invalid_argument);
}

TEST_CASE("unconstrained minimizer") {
  ActiveSetSolver solver;
  QpSolution sol = solver.solve(unconstrained_2d());
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK(sol.z[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.z[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.active_set.empty());
  KktResiduals res = kkt_residuals(unconstrained_2d(), sol);
  CHECK(res.max() <= 1e-12);
}

TEST_CASE("single active bound") {
  // min 1/2 z^2 s.t. -z <= -1
  Matrix H = Matrix::Identity(1, 1);
  Vector F = Vector::Zero(1);
  Matrix A(1, 1);
  A << -1.0;
  Vector b(1);
  b << -1.0;
  QpProblem p(H, F, A, b);
  ActiveSetSolver solver;
  QpSolution sol = solver.solve(p);
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK(sol.z[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sol.duals[0] == doctest::Approx(1.0).epsilon(1e-10));
  REQUIRE(sol.active_set.size() == 1);
  CHECK(sol.active_set[0] == 0);
}

TEST_CASE("corner solution agrees with the enumeration oracle") {
  Matrix H = Matrix::Identity(2, 2);
  Vector F = Vector::Zero(2);
  Matrix A(2, 2);
  A << 1.0, 1.0, -1.0, 0.0;
  Vector b(2);
  b << -2.0, 0.0;
  QpProblem p(H, F, A, b);

  ActiveSetSolver solver;
  QpSolution sol = solver.solve(p);
  QpSolution ref = enumerate_oracle(p);
  REQUIRE(sol.status == QpStatus::Optimal);
  REQUIRE(ref.status == QpStatus::Optimal);
  CHECK((sol.z - ref.z).lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK(sol.z[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sol.z[1] == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("oracle basics") {
  QpSolution unc = enumerate_oracle(unconstrained_2d());
  REQUIRE(unc.status == QpStatus::Optimal);
  CHECK(unc.z[0] == doctest::Approx(1.0));

  // contradictory bounds: z <= -1 and -z <= -1
  Matrix A(2, 1);
  A << 1.0, -1.0;
  Vector b(2);
  b << -1.0, -1.0;
  QpProblem empty(Matrix::Identity(1, 1), Vector::Zero(1), A, b);
  CHECK(enumerate_oracle(empty).status == QpStatus::Infeasible);

  ActiveSetSolver solver;
  QpSolution sol = solver.solve(empty);
  CHECK(sol.status == QpStatus::Infeasible);
  CHECK(!sol.note.empty());

  QpProblem too_big(Matrix::Identity(1, 1), Vector::Zero(1), Matrix::Zero(13, 1),
                    Vector::Ones(13));
  CHECK_THROWS_AS(enumerate_oracle(too_big), std::invalid_argument);
}

TEST_CASE("solver matches oracle on 500 random feasible problems") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> d_d(2, 5);
  std::uniform_int_distribution<int> nc_d(0, 8);
  ActiveSetSolver solver;
  for (int trial = 0; trial < 500; ++trial) {
    QpProblem p = testsupport::random_feasible_qp(rng, d_d(rng), nc_d(rng));
    QpSolution sol = solver.solve(p);
    QpSolution ref = enumerate_oracle(p);
    REQUIRE(sol.status == QpStatus::Optimal);
    REQUIRE(ref.status == QpStatus::Optimal);
    CHECK((sol.z - ref.z).lpNorm<Eigen::Infinity>() <= 1e-6);
    KktResiduals res = kkt_residuals(p, sol);
    double fscale = 1.0 + p.F.lpNorm<Eigen::Infinity>();
    CHECK(res.stationarity <= 1e-7 * fscale);
    CHECK(res.primal <= 1e-8);
    CHECK(res.comp_slack <= 1e-8 * fscale);
    CHECK(res.dual_neg <= 1e-10);
  }
}

TEST_CASE("kkt residuals flag a perturbed point") {
  std::mt19937_64 rng(7);
  QpProblem p = testsupport::random_feasible_qp(rng, 3, 4);
  ActiveSetSolver solver;
  QpSolution sol = solver.solve(p);
  REQUIRE(sol.status == QpStatus::Optimal);
  QpSolution off = sol;
  off.z[0] += 1e-3;
  KktResiduals res = kkt_residuals(p, off);
  CHECK(res.stationarity > 1e-4);
}

TEST_CASE("duplicated rows leave the minimizer unchanged") {
  std::mt19937_64 rng(29);
  ActiveSetSolver solver;
  for (int trial = 0; trial < 100; ++trial) {
    QpProblem p = testsupport::random_feasible_qp(rng, 3, 5);
    QpSolution base = solver.solve(p);
    REQUIRE(base.status == QpStatus::Optimal);

    Matrix A2(p.A.rows() * 2, p.A.cols());
    Vector b2(p.b.size() * 2);
    A2 << p.A, p.A;
    b2 << p.b, p.b;
    QpProblem doubled(p.H, p.F, A2, b2);
    QpSolution dup = solver.solve(doubled);
    REQUIRE(dup.status == QpStatus::Optimal);
    CHECK((base.z - dup.z).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("positive rescaling of the objective preserves the argmin") {
  std::mt19937_64 rng(31);
  ActiveSetSolver solver;
  for (int trial = 0; trial < 100; ++trial) {
    QpProblem p = testsupport::random_feasible_qp(rng, 3, 6);
    std::uniform_real_distribution<double> c_d(0.01, 100.0);
    double c = c_d(rng);
    QpProblem scaled(c * p.H, c * p.F, p.A, p.b);
    QpSolution a = solver.solve(p);
    QpSolution b = solver.solve(scaled);
    REQUIRE(a.status == QpStatus::Optimal);
    REQUIRE(b.status == QpStatus::Optimal);
    CHECK((a.z - b.z).lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + a.z.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("warm start reproduces the cold answer in one certified solve") {
  std::mt19937_64 rng(37);
  ActiveSetSolver solver;
  for (int trial = 0; trial < 50; ++trial) {
    QpProblem p = testsupport::random_feasible_qp(rng, 4, 7);
    QpSolution cold = solver.solve(p);
    REQUIRE(cold.status == QpStatus::Optimal);
    std::vector<int> seed;
    for (int i : cold.active_set) {
      if (cold.duals[i] > 1e-9) seed.push_back(i);  // strongly active rows
    }
    QpSolution warm = solver.solve(p, seed);
    REQUIRE(warm.status == QpStatus::Optimal);
    CHECK((cold.z - warm.z).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK(warm.iterations <= 1);
  }
}

TEST_CASE("kkt_residuals rejects infeasible input") {
  Matrix A(2, 1);
  A << 1.0, -1.0;
  Vector b(2);
  b << -1.0, -1.0;
  QpProblem empty(Matrix::Identity(1, 1), Vector::Zero(1), A, b);
  ActiveSetSolver solver;
  QpSolution sol = solver.solve(empty);
  REQUIRE(sol.status == QpStatus::Infeasible);
  CHECK_THROWS_AS(kkt_residuals(empty, sol), std::invalid_argument);
}

TEST_CASE("feasible set far from the unconstrained minimizer") {
  // phase 1 must not mistake distance for emptiness
  Matrix H = Matrix::Identity(1, 1);
  Vector F = Vector::Zero(1);
  Matrix A(1, 1);
  A << -1.0;
  Vector b(1);
  b << -100.0;  // z >= 100
  QpProblem p(H, F, A, b);
  ActiveSetSolver solver;
  QpSolution sol = solver.solve(p);
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK(sol.z[0] == doctest::Approx(100.0).epsilon(1e-9));
  QpSolution ref = enumerate_oracle(p);
  CHECK((sol.z - ref.z).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("row scaling does not move the minimizer") {
  // scaling a row of (A, b) by c > 0 leaves the constraint unchanged, so the
  // equilibrated solve must agree with the plain one and with the oracle
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> d_d(2, 4);
  std::uniform_int_distribution<int> pow_d(0, 9);
  ActiveSetSolver solver;
  for (int trial = 0; trial < 100; ++trial) {
    QpProblem p = testsupport::random_feasible_qp(rng, d_d(rng), 6);
    Matrix A = p.A;
    Vector b = p.b;
    for (int i = 0; i < p.num_constraints(); ++i) {
      double c = std::pow(10.0, pow_d(rng));
      A.row(i) *= c;
      b[i] *= c;
    }
    QpProblem scaled(p.H, p.F, A, b);
    QpSolution base = solver.solve(p);
    QpSolution mixed = solver.solve(scaled);
    QpSolution ref = enumerate_oracle(scaled);
    REQUIRE(base.status == QpStatus::Optimal);
    REQUIRE(mixed.status == QpStatus::Optimal);
    CHECK((base.z - mixed.z).lpNorm<Eigen::Infinity>() <=
          1e-7 * (1.0 + base.z.lpNorm<Eigen::Infinity>()));
    CHECK((mixed.z - ref.z).lpNorm<Eigen::Infinity>() <=
          1e-6 * (1.0 + ref.z.lpNorm<Eigen::Infinity>()));
    KktResiduals res = kkt_residuals(scaled, mixed);
    CHECK(res.stationarity <= 1e-7 * (1.0 + scaled.F.lpNorm<Eigen::Infinity>()));
    CHECK(res.dual_neg <= 1e-10);
  }
}

TEST_CASE("warm start tolerates stale indices") {
  std::mt19937_64 rng(73);
  QpProblem p = testsupport::random_feasible_qp(rng, 3, 5);
  ActiveSetSolver solver;
  QpSolution cold = solver.solve(p);
  const int stale[] = {99, -3, 0, 0, 2};
  QpSolution warm = solver.solve(p, stale);
  REQUIRE(warm.status == QpStatus::Optimal);
  CHECK((cold.z - warm.z).lpNorm<Eigen::Infinity>() <= 1e-7);
}
