#include "diffsylv/dense_solvers.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace diffsylv;
using testsupport::TestRng;
using testsupport::grid;
using testsupport::random_matrix;
using testsupport::rk4_sylvester;
using testsupport::stable_dense;

namespace {

DseProblem random_problem(TestRng& rng, Index n, Index m, double t_final,
                          int snaps, double scale = 1.0) {
  Matrix A = stable_dense(rng, n, scale);
  Matrix B = stable_dense(rng, m, scale);
  Matrix C = random_matrix(rng, n, m);
  Matrix D = random_matrix(rng, n, m);
  return DseProblem(SylvesterOperator(std::move(A), std::move(B)), std::move(C),
                    std::move(D), grid(t_final, snaps));
}

/// Marginally stable diagonal pair whose (0, 0) eigenvalue sum is exactly 0.
DseProblem zero_gap_problem(TestRng& rng, Index n, Index m, double t_final,
                            int snaps) {
  Matrix A = Matrix::Zero(n, n);
  Matrix B = Matrix::Zero(m, m);
  for (Index i = 1; i < n; ++i) A(i, i) = Complex(-0.2 - rng.uniform(), 0);
  for (Index j = 1; j < m; ++j) B(j, j) = Complex(-0.2 - rng.uniform(), 0);
  Matrix C = random_matrix(rng, n, m);
  Matrix D = random_matrix(rng, n, m);
  return DseProblem(SylvesterOperator(std::move(A), std::move(B)), std::move(C),
                    std::move(D), grid(t_final, snaps));
}

}  // namespace

TEST_CASE("DseProblem validates its data") {
  TestRng rng(401);
  Matrix A = stable_dense(rng, 3);
  Matrix B = stable_dense(rng, 2);
  Matrix C = random_matrix(rng, 3, 2);
  Matrix D = random_matrix(rng, 3, 2);

  SUBCASE("grid must start at zero") {
    CHECK_THROWS_AS(DseProblem(SylvesterOperator(A, B), C, D, {0.1, 0.2}),
                    std::invalid_argument);
  }
  SUBCASE("grid must be strictly increasing") {
    CHECK_THROWS_AS(DseProblem(SylvesterOperator(A, B), C, D, {0.0, 0.2, 0.2}),
                    std::invalid_argument);
  }
  SUBCASE("grid must be nonempty") {
    CHECK_THROWS_AS(DseProblem(SylvesterOperator(A, B), C, D, {}),
                    std::invalid_argument);
  }
  SUBCASE("C and D shapes must match the operator") {
    CHECK_THROWS_AS(DseProblem(SylvesterOperator(A, B), Matrix::Zero(2, 2), D,
                               {0.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DseProblem(SylvesterOperator(A, B), C, Matrix::Zero(3, 3),
                               {0.0, 1.0}),
                    std::invalid_argument);
  }
  SUBCASE("lyapunov mode needs a square problem") {
    CHECK_THROWS_AS(DseProblem(SylvesterOperator(A, B), C, D, {0.0, 1.0}, true),
                    std::invalid_argument);
  }
}

TEST_CASE("solve_spectral matches an independent RK4 reference") {
  TestRng rng(402);
  for (int trial = 0; trial < 5; ++trial) {
    DseProblem p = random_problem(rng, 8, 6, 1.0, 4);
    SolveReport rep = solve_spectral(p);
    REQUIRE(rep.snapshots.size() == p.t_grid.size());
    for (std::size_t i = 0; i < p.t_grid.size(); ++i) {
      Matrix want = rk4_sylvester(p.op.A(), p.op.B(), p.C, p.D, p.t_grid[i], 4000);
      CHECK(rel_error_fro(rep.snapshots[i], want) < 1e-9);
    }
    CHECK(rel_error_fro(rep.snapshots[0], p.D) < 1e-13);
    CHECK(rep.method == "spectral");
    CHECK(rep.converged);
    CHECK(rep.wall_time_s >= 0.0);
    CHECK(rep.cond_uv >= 1.0);
  }
}

TEST_CASE("closed-form solvers agree on problems with a spectral gap") {
  TestRng rng(403);
  for (int trial = 0; trial < 5; ++trial) {
    DseProblem p = random_problem(rng, 7, 5, 0.8, 3);
    SolveReport sp = solve_spectral(p);
    SolveReport voc = solve_voc_split(p);
    SolveReport em = solve_expm_direct(p);
    for (std::size_t i = 0; i < p.t_grid.size(); ++i) {
      CHECK(rel_error_fro(voc.snapshots[i], sp.snapshots[i]) < 1e-11);
      CHECK(rel_error_fro(em.snapshots[i], sp.snapshots[i]) < 1e-11);
    }
  }
}

TEST_CASE("voc split requires the spectral gap; expm_direct does not") {
  TestRng rng(404);
  DseProblem p = zero_gap_problem(rng, 4, 3, 0.6, 3);
  CHECK_THROWS_AS(solve_voc_split(p), SingularOperatorError);

  SolveReport sp = solve_spectral(p);  // phi mask handles z = 0 exactly
  SolveReport em = solve_expm_direct(p);
  for (std::size_t i = 0; i < p.t_grid.size(); ++i) {
    Matrix want = rk4_sylvester(p.op.A(), p.op.B(), p.C, p.D, p.t_grid[i], 4000);
    CHECK(rel_error_fro(sp.snapshots[i], want) < 1e-9);
    CHECK(rel_error_fro(em.snapshots[i], want) < 1e-8);
  }
}

TEST_CASE("expm_direct works without diagonalizability") {
  // A is a Jordan block: the spectral machinery refuses it, the quadrature
  // fallback must not.
  Matrix A(2, 2);
  A << Complex(-1, 0), Complex(1, 0), Complex(0, 0), Complex(-1, 0);
  Matrix B = Matrix::Zero(2, 2);
  B(0, 0) = Complex(-0.5, 0);
  B(1, 1) = Complex(-0.7, 0);
  TestRng rng(405);
  Matrix C = random_matrix(rng, 2, 2);
  Matrix D = random_matrix(rng, 2, 2);
  DseProblem p(SylvesterOperator(A, B), C, D, grid(1.0, 4));

  CHECK_THROWS_AS(solve_spectral(p), NotDiagonalizableError);
  SolveReport em = solve_expm_direct(p);
  for (std::size_t i = 0; i < p.t_grid.size(); ++i) {
    Matrix want = rk4_sylvester(A, B, C, D, p.t_grid[i], 4000);
    CHECK(rel_error_fro(em.snapshots[i], want) < 1e-9);
  }
}

TEST_CASE("solve_algebraic produces a steady state") {
  TestRng rng(406);
  Matrix A = stable_dense(rng, 6);
  Matrix B = stable_dense(rng, 6);
  Matrix C = random_matrix(rng, 6, 6);
  SylvesterOperator op(A, B);
  Matrix X = solve_algebraic(op, C);
  CHECK((op.apply(X) + C).norm() < 1e-11 * (C.norm() + X.norm()));

  // The stable ODE converges to the steady state: X(T) -> S^{-1}(-C).
  DseProblem p(op, C, Matrix::Zero(6, 6), {0.0, 120.0});
  SolveReport rep = solve_spectral(p);
  CHECK(rel_error_fro(rep.snapshots.back(), X) < 1e-9);
}

TEST_CASE("finite-difference diagnostics flag the true solution as consistent") {
  TestRng rng(407);
  DseProblem p = random_problem(rng, 6, 6, 0.5, 5);
  for (const SolveReport& rep :
       {solve_spectral(p), solve_voc_split(p), solve_expm_direct(p)}) {
    REQUIRE(rep.residual_norms.size() == p.t_grid.size());
    REQUIRE(rep.residual_norms_2.size() == p.t_grid.size());
    for (double r : rep.residual_norms) CHECK(r < 1e-7);
  }
}

TEST_CASE("lyapunov mode re-symmetrizes snapshots") {
  TestRng rng(408);
  Matrix A = stable_dense(rng, 5);
  Matrix F = random_matrix(rng, 5, 2);
  Matrix G = random_matrix(rng, 5, 1);
  Matrix C = F * F.adjoint();
  Matrix D = G * G.adjoint();
  DseProblem p(SylvesterOperator(A, A.adjoint()), C, D, grid(0.7, 4), true);
  for (const SolveReport& rep :
       {solve_spectral(p), solve_voc_split(p), solve_expm_direct(p)}) {
    for (const Matrix& X : rep.snapshots)
      CHECK((X - X.adjoint()).norm() <= 1e-13 * std::max(1.0, X.norm()));
  }
}

TEST_CASE("zero data solves to zero") {
  TestRng rng(409);
  Matrix A = stable_dense(rng, 4);
  Matrix B = stable_dense(rng, 3);
  DseProblem p(SylvesterOperator(A, B), Matrix::Zero(4, 3), Matrix::Zero(4, 3),
               grid(1.0, 3));
  SolveReport rep = solve_spectral(p);
  for (const Matrix& X : rep.snapshots) CHECK(X.norm() == 0.0);
}

TEST_CASE("snapshot_dense works for both storage kinds") {
  TestRng rng(410);
  DseProblem p = random_problem(rng, 4, 4, 0.5, 2);
  SolveReport rep = solve_spectral(p);
  CHECK((rep.snapshot_dense(1) - rep.snapshots[1]).norm() == 0.0);
}
