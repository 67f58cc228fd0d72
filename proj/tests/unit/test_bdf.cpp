#include "diffsylv/bdf.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace diffsylv;
using testsupport::TestRng;
using testsupport::bdf_weights_oracle;
using testsupport::grid;
using testsupport::hermitian_stable;
using testsupport::random_matrix;
using testsupport::stable_dense;

namespace {

Matrix scalar(double re, double im = 0.0) {
  Matrix M(1, 1);
  M(0, 0) = Complex(re, im);
  return M;
}

}  // namespace

TEST_CASE("bdf coefficients satisfy the monomial order conditions") {
  for (int p = 1; p <= 6; ++p) {
    BdfCoefficients c = bdf_coefficients(p);
    testsupport::BdfWeights w = bdf_weights_oracle(p);
    REQUIRE(c.alpha.size() == p + 1);
    CHECK(c.alpha(0) == 1.0);
    CHECK(std::abs(c.beta - w.beta) <= 1e-13 * std::abs(w.beta));
    for (int j = 0; j <= p; ++j)
      CHECK(std::abs(c.alpha(j) - w.alpha(j)) <= 1e-13);
  }
}

TEST_CASE("bdf coefficient order range") {
  CHECK_THROWS_AS(bdf_coefficients(0), std::invalid_argument);
  CHECK_THROWS_AS(bdf_coefficients(7), std::invalid_argument);
  // Spot values against the classical table.
  BdfCoefficients c2 = bdf_coefficients(2);
  CHECK(c2.beta == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(c2.alpha(1) == doctest::Approx(-4.0 / 3.0).epsilon(1e-15));
  CHECK(c2.alpha(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("bdf_step is the scalar implicit Euler step at order 1") {
  SylvesterOperator op(scalar(-0.6), scalar(-0.4));  // a + b = -1
  BdfConfig cfg;
  cfg.order = 1;
  cfg.step_size = 0.1;
  Matrix X = bdf_step(op, Matrix::Zero(1, 1), {scalar(1.0)}, cfg);
  CHECK(std::abs(X(0, 0) - Complex(1.0 / 1.1, 0)) < 1e-14);
}

TEST_CASE("bdf_step reproduces linear solutions exactly at every order") {
  // With S = 0 the solution of X' = C is X(t) = D + t C, a degree-1
  // polynomial every BDF order must integrate without error.
  Index n = 3;
  SylvesterOperator op(Matrix::Zero(n, n), Matrix::Zero(n, n));
  TestRng rng(701);
  Matrix C = random_matrix(rng, n, n);
  Matrix D = random_matrix(rng, n, n);
  double h = 0.2;
  for (int p = 1; p <= 6; ++p) {
    BdfConfig cfg;
    cfg.order = p;
    cfg.step_size = h;
    std::vector<Matrix> history;
    for (int j = 1; j <= p; ++j) history.push_back(D + ((p - j) * h) * C);
    Matrix X = bdf_step(op, C, history, cfg);
    Matrix want = D + (p * h) * C;
    CHECK((X - want).norm() <= 1e-13 * want.norm());
  }
}

TEST_CASE("bdf_step validates history and detects the singular shift") {
  SylvesterOperator op(scalar(-1.0), scalar(-1.0));
  BdfConfig cfg;
  cfg.order = 2;
  cfg.step_size = 0.1;
  CHECK_THROWS_AS(bdf_step(op, Matrix::Zero(1, 1), {scalar(1.0)}, cfg),
                  std::invalid_argument);

  // a + b = 1/(h beta) makes the shifted operator exactly singular.
  BdfConfig euler;
  euler.order = 1;
  euler.step_size = 0.1;
  SylvesterOperator sing(scalar(5.0), scalar(5.0));
  CHECK_THROWS_AS(bdf_step(sing, Matrix::Zero(1, 1), {scalar(1.0)}, euler),
                  SingularOperatorError);
}

TEST_CASE("bdf_integrate tracks the spectral solution") {
  TestRng rng(702);
  Matrix A = stable_dense(rng, 6);
  Matrix B = stable_dense(rng, 6);
  Matrix C = random_matrix(rng, 6, 6);
  Matrix D = random_matrix(rng, 6, 6);
  DseProblem p(SylvesterOperator(A, B), C, D, grid(0.5, 5));
  SolveReport sp = solve_spectral(p);

  BdfConfig cfg;
  cfg.order = 2;
  cfg.step_size = 1e-3;
  SolveReport rep = bdf_integrate(p, cfg);
  REQUIRE(rep.snapshots.size() == p.t_grid.size());
  for (std::size_t i = 0; i < p.t_grid.size(); ++i)
    CHECK(rel_error_fro(rep.snapshots[i], sp.snapshots[i]) < 1e-5);
  CHECK(rep.method == "bdf2");
  CHECK(rep.dim_or_order == 2);
  CHECK(rep.residual_norms.size() == p.t_grid.size());
  CHECK(rep.residual_norms[0] == 0.0);
  CHECK_FALSE(rep.step_residuals.empty());
  for (double r : rep.step_residuals) CHECK(r < 1e-10);
}

TEST_CASE("A-stable orders damp a decaying Lyapunov flow at large steps") {
  TestRng rng(703);
  Matrix A = hermitian_stable(rng, 5, 4.0);
  Matrix G = random_matrix(rng, 5, 2);
  DseProblem p(SylvesterOperator(A, A.adjoint()), Matrix::Zero(5, 5),
               G * G.adjoint(), grid(4.0, 8), true);
  for (int order : {1, 2}) {
    BdfConfig cfg;
    cfg.order = order;
    cfg.step_size = 0.5;  // h ||A|| well beyond an explicit method's reach
    SolveReport rep = bdf_integrate(p, cfg);
    for (std::size_t i = 1; i < rep.snapshots.size(); ++i)
      CHECK(rep.snapshots[i].norm() <=
            rep.snapshots[i - 1].norm() * (1.0 + 1e-12));
    for (const Matrix& X : rep.snapshots)
      CHECK((X - X.adjoint()).norm() <= 1e-13 * std::max(1.0, X.norm()));
  }
}

TEST_CASE("grid alignment is enforced") {
  TestRng rng(704);
  DseProblem p(SylvesterOperator(stable_dense(rng, 3), stable_dense(rng, 3)),
               random_matrix(rng, 3, 3), random_matrix(rng, 3, 3),
               {0.0, 0.25, 0.5});
  BdfConfig cfg;
  cfg.order = 2;
  cfg.step_size = 0.1;  // 0.25 is not a multiple
  CHECK_THROWS_AS(bdf_integrate(p, cfg), std::invalid_argument);
  cfg.step_size = 0.05;
  CHECK_NOTHROW(bdf_integrate(p, cfg));
}

TEST_CASE("trivial grid returns the initial value") {
  TestRng rng(705);
  Matrix D = random_matrix(rng, 4, 4);
  DseProblem p(SylvesterOperator(stable_dense(rng, 4), stable_dense(rng, 4)),
               random_matrix(rng, 4, 4), D, {0.0});
  BdfConfig cfg;
  SolveReport rep = bdf_integrate(p, cfg);
  REQUIRE(rep.snapshots.size() == 1);
  CHECK((rep.snapshots[0] - D).norm() == 0.0);
}

TEST_CASE("exact startup seeds the history with the spectral solution") {
  TestRng rng(706);
  Matrix A = stable_dense(rng, 5);
  Matrix B = stable_dense(rng, 4);
  Matrix C = random_matrix(rng, 5, 4);
  Matrix D = random_matrix(rng, 5, 4);
  double h = 0.05;
  // Grid spacing equals the step so the startup nodes are snapshots.
  DseProblem p(SylvesterOperator(A, B), C, D, grid(6 * h, 6));
  SolveReport sp = solve_spectral(p);

  BdfConfig cfg;
  cfg.order = 4;
  cfg.step_size = h;
  cfg.startup = BdfStartup::Exact;
  SolveReport rep = bdf_integrate(p, cfg);
  for (std::size_t i = 1; i < 4; ++i)  // startup nodes h, 2h, 3h
    CHECK(rel_error_fro(rep.snapshots[i], sp.snapshots[i]) < 1e-12);
  // The integration that follows is plain BDF4 at h = 0.05 (h ||S|| ~ 0.4),
  // so only coarse truncation-level agreement is available here; the sharp
  // rate itself is pinned by the convergence-order tests.
  CHECK(rel_error_fro(rep.snapshots.back(), sp.snapshots.back()) < 1e-3);
}

TEST_CASE("ramp startup is self-contained and convergent") {
  TestRng rng(707);
  Matrix A = stable_dense(rng, 4);
  Matrix B = stable_dense(rng, 4);
  Matrix C = random_matrix(rng, 4, 4);
  Matrix D = random_matrix(rng, 4, 4);
  DseProblem p(SylvesterOperator(A, B), C, D, grid(0.4, 2));
  SolveReport sp = solve_spectral(p);

  BdfConfig cfg;
  cfg.order = 3;
  cfg.startup = BdfStartup::Ramp;
  double prev = 0.0;
  for (int k = 0; k < 3; ++k) {
    cfg.step_size = 0.02 / (1 << k);
    double err = rel_error_fro(bdf_integrate(p, cfg).snapshots.back(),
                               sp.snapshots.back());
    if (k > 0) CHECK(err < 0.6 * prev);  // strictly convergent under refinement
    prev = err;
  }
}

TEST_CASE("bdf config validation") {
  TestRng rng(708);
  DseProblem p(SylvesterOperator(stable_dense(rng, 3), stable_dense(rng, 3)),
               random_matrix(rng, 3, 3), random_matrix(rng, 3, 3), grid(0.2, 2));
  BdfConfig cfg;
  cfg.order = 7;
  CHECK_THROWS_AS(bdf_integrate(p, cfg), std::invalid_argument);
  cfg.order = 2;
  cfg.step_size = 0.0;
  CHECK_THROWS_AS(bdf_integrate(p, cfg), std::invalid_argument);
}
