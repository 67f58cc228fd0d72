#include "diffsylv/krylov.hpp"

#include "diffsylv/taylor.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace diffsylv;
using testsupport::TestRng;
using testsupport::grid;
using testsupport::krylov_residual_dense;
using testsupport::random_matrix;
using testsupport::stable_dense;

namespace {

SparseMatrix laplacian_1d(Index n) {
  double h2 = static_cast<double>((n + 1) * (n + 1));
  std::vector<Eigen::Triplet<Complex>> trips;
  for (Index i = 0; i < n; ++i) {
    trips.emplace_back(i, i, Complex(-2.0 * h2, 0));
    if (i > 0) trips.emplace_back(i, i - 1, Complex(h2, 0));
    if (i + 1 < n) trips.emplace_back(i, i + 1, Complex(h2, 0));
  }
  return SparseMatrix(n, n, trips);
}

struct SmallProblem {
  SparseMatrix A, B;
  FactoredMatrix C, D;
  Matrix Ad, Bd;
};

SmallProblem random_sparse_problem(TestRng& rng, Index n, Index m, Index rc,
                                   Index rd) {
  SmallProblem p;
  p.Ad = stable_dense(rng, n);
  p.Bd = stable_dense(rng, m);
  p.A = SparseMatrix::from_dense(p.Ad);
  p.B = SparseMatrix::from_dense(p.Bd);
  p.C = FactoredMatrix(random_matrix(rng, n, rc), random_matrix(rng, m, rc));
  p.D = FactoredMatrix(random_matrix(rng, n, rd), random_matrix(rng, m, rd));
  return p;
}

}  // namespace

TEST_CASE("block_arnoldi produces an orthonormal basis with a consistent projection") {
  SparseMatrix A = laplacian_1d(50);
  TestRng rng(601);
  Matrix seed = random_matrix(rng, 50, 2);
  KrylovBasis basis = block_arnoldi(A, seed, 6);

  Index k = basis.dimension();
  REQUIRE(k > 0);
  CHECK(k <= 14);  // (steps + 1) * block width
  CHECK((basis.Q.adjoint() * basis.Q - Matrix::Identity(k, k)).norm() <= 1e-10);
  Matrix H = basis.Q.adjoint() * A.apply(basis.Q);
  CHECK((basis.H_proj - H).norm() <= 1e-12 * std::max(1.0, H.norm()));
  CHECK(basis.order == 6);
  CHECK(basis.block_width >= 1);
}

TEST_CASE("block_arnoldi spans the block Krylov space") {
  TestRng rng(602);
  Matrix Ad = stable_dense(rng, 30);
  SparseMatrix A = SparseMatrix::from_dense(Ad);
  Matrix seed = random_matrix(rng, 30, 2);
  int steps = 4;
  KrylovBasis basis = block_arnoldi(A, seed, steps);

  Matrix P = basis.Q * basis.Q.adjoint();
  Matrix block = seed;
  for (int j = 0; j <= steps; ++j) {
    CHECK((block - P * block).norm() <= 1e-8 * block.norm());
    block = Ad * block;
  }
}

TEST_CASE("deflation shrinks dependent seed blocks") {
  TestRng rng(603);
  SparseMatrix A = laplacian_1d(20);
  Matrix v = random_matrix(rng, 20, 1);
  Matrix seed(20, 2);
  seed.col(0) = v;
  seed.col(1) = 2.0 * v;  // exactly dependent
  KrylovBasis basis = block_arnoldi(A, seed, 3);
  CHECK(basis.dimension() <= 4);  // width collapses to 1 immediately
  Index k = basis.dimension();
  CHECK((basis.Q.adjoint() * basis.Q - Matrix::Identity(k, k)).norm() <= 1e-10);
}

TEST_CASE("invariant subspace stops the iteration early") {
  // e_1 is an eigenvector of a diagonal matrix: the Krylov space is 1-dim.
  std::vector<Eigen::Triplet<Complex>> trips;
  for (Index i = 0; i < 8; ++i) trips.emplace_back(i, i, Complex(-1.0 - i, 0));
  SparseMatrix A(8, 8, trips);
  Matrix seed = Matrix::Zero(8, 1);
  seed(0, 0) = Complex(1, 0);
  KrylovBasis basis = block_arnoldi(A, seed, 5);
  CHECK(basis.dimension() == 1);
  CHECK(basis.order < 5);
  CHECK(std::abs(basis.H_proj(0, 0) - Complex(-1, 0)) < 1e-14);
}

TEST_CASE("block_arnoldi edge cases") {
  SparseMatrix A = laplacian_1d(10);
  TestRng rng(604);
  SUBCASE("zero seed") {
    CHECK_THROWS_AS(block_arnoldi(A, Matrix::Zero(10, 2), 3), ZeroSeedError);
  }
  SUBCASE("steps = 0 keeps just the orthonormalized seed") {
    Matrix seed = random_matrix(rng, 10, 3);
    KrylovBasis basis = block_arnoldi(A, seed, 0);
    CHECK(basis.dimension() == 3);
    CHECK(basis.order == 0);
    CHECK(basis.H_proj.rows() == 3);
  }
  SUBCASE("space capacity caps the dimension") {
    Matrix seed = random_matrix(rng, 10, 2);
    KrylovBasis basis = block_arnoldi(A, seed, 50);
    CHECK(basis.dimension() <= 10);
    Index k = basis.dimension();
    CHECK((basis.Q.adjoint() * basis.Q - Matrix::Identity(k, k)).norm() <= 1e-10);
  }
}

TEST_CASE("residual_estimate matches the dense brute-force residual") {
  TestRng rng(605);
  SmallProblem p = random_sparse_problem(rng, 12, 9, 2, 1);
  Matrix seedA(12, 3), seedB(9, 3);
  seedA << p.D.F1(), p.C.F1();
  seedB << p.D.F2(), p.C.F2();

  for (int steps : {1, 2, 3}) {
    KrylovBasis basisA = block_arnoldi(p.A, seedA, steps);
    KrylovBasis basisB = block_arnoldi(p.B.adjoint(), seedB, steps);
    Matrix Y = random_matrix(rng, basisA.dimension(), basisB.dimension());
    double est = residual_estimate(p.A, p.B, basisA, basisB, Y, p.C, 0.5);
    Matrix R =
        krylov_residual_dense(p.Ad, p.Bd, basisA, basisB, Y, p.C.dense());
    CHECK(est == doctest::Approx(R.norm()).epsilon(1e-12));
  }
}

TEST_CASE("full-space projection reproduces the dense solution") {
  TestRng rng(606);
  SmallProblem p = random_sparse_problem(rng, 10, 8, 1, 1);
  std::vector<double> tg = grid(1.0, 4);
  SolveReport rep = solve_projected_dse(p.A, p.B, p.C, p.D, tg, 1e-12, 40);
  CHECK(rep.converged);

  DseProblem dense(SylvesterOperator(p.Ad, p.Bd), p.C.dense(), p.D.dense(), tg);
  SolveReport sp = solve_spectral(dense);
  REQUIRE(rep.factored_snapshots.size() == tg.size());
  for (std::size_t i = 0; i < tg.size(); ++i)
    CHECK(rel_error_fro(rep.snapshot_dense(i), sp.snapshots[i]) < 1e-9);
  CHECK(rep.method == "krylov");
  CHECK(rep.dim_or_order > 0);
}

TEST_CASE("projected solve satisfies the Galerkin condition") {
  TestRng rng(607);
  SmallProblem p = random_sparse_problem(rng, 14, 11, 1, 2);
  std::vector<double> tg = grid(0.8, 3);
  ProjectedSolution sol =
      solve_projected_dse_detailed(p.A, p.B, p.C, p.D, tg, 1e-10, 30);
  double scale = p.C.norm_fro() + p.D.norm_fro() * p.A.norm1();
  for (std::size_t i = 0; i < tg.size(); ++i)
    CHECK(galerkin_norm(p.A, p.B, sol, p.C, i) <= 1e-10 * scale);
}

TEST_CASE("taylor polynomials of the data live inside the Krylov spaces") {
  TestRng rng(608);
  SmallProblem p = random_sparse_problem(rng, 16, 16, 1, 1);
  Matrix seedA(16, 2), seedB(16, 2);
  seedA << p.D.F1(), p.C.F1();
  seedB << p.D.F2(), p.C.F2();

  for (int ord = 1; ord <= 4; ++ord) {
    KrylovBasis basisA = block_arnoldi(p.A, seedA, ord);
    KrylovBasis basisB = block_arnoldi(p.B.adjoint(), seedB, ord);
    Matrix X = taylor_factored(p.D, p.C, p.Ad, p.Bd, {ord, ord}, 0.4);
    Matrix PA = basisA.Q * basisA.Q.adjoint();
    Matrix PB = basisB.Q * basisB.Q.adjoint();
    CHECK((X - PA * X * PB).norm() <= 1e-10 * X.norm());
  }
}

TEST_CASE("residual history decreases to convergence") {
  SparseMatrix A = laplacian_1d(60);
  TestRng rng(609);
  FactoredMatrix C(random_matrix(rng, 60, 1), random_matrix(rng, 60, 1));
  FactoredMatrix D = FactoredMatrix::zero(60, 60);
  ProjectedSolution sol = solve_projected_dse_detailed(
      A, A.adjoint(), C, D, grid(1e-4, 3), 1e-9, 40);
  REQUIRE(sol.residual_history.size() >= 2);
  CHECK(sol.report.converged);
  CHECK(sol.residual_history.back() < sol.residual_history.front());
}

TEST_CASE("lyapunov problems are detected and solved with one basis") {
  SparseMatrix A = laplacian_1d(40);
  TestRng rng(610);
  Matrix F = random_matrix(rng, 40, 1);
  Matrix G = random_matrix(rng, 40, 1);
  FactoredMatrix C(F, F);
  FactoredMatrix D(G, G);
  std::vector<double> tg = grid(2e-4, 3);
  ProjectedSolution sol =
      solve_projected_dse_detailed(A, A.adjoint(), C, D, tg, 1e-9, 40);
  CHECK(sol.lyapunov);
  CHECK(sol.basisA.dimension() == sol.basisB.dimension());
  CHECK(sol.report.dim_or_order == sol.basisA.dimension());

  DseProblem dense(SylvesterOperator(A.dense(), A.dense().adjoint()), C.dense(),
                   D.dense(), tg, true);
  SolveReport sp = solve_spectral(dense);
  for (std::size_t i = 0; i < tg.size(); ++i) {
    Matrix X = sol.report.snapshot_dense(i);
    CHECK((X - X.adjoint()).norm() <= 1e-12 * std::max(1.0, X.norm()));
    // PSD by construction: the factored snapshot is FF^H.
    Eigen::SelfAdjointEigenSolver<Matrix> es(X);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12 * std::max(1.0, norm2(X)));
    CHECK(rel_error_fro(X, sp.snapshots[i]) < 1e-7);
  }
}

TEST_CASE("zero data short-circuits to zero snapshots") {
  SparseMatrix A = laplacian_1d(12);
  FactoredMatrix Z = FactoredMatrix::zero(12, 12);
  SolveReport rep =
      solve_projected_dse(A, A.adjoint(), Z, Z, grid(0.1, 2), 1e-8, 10);
  CHECK(rep.converged);
  REQUIRE(rep.factored_snapshots.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(rep.snapshot_dense(i).norm() == 0.0);
}

TEST_CASE("non-convergence is reported, not thrown") {
  // n = 400 stiff Laplacian at T = 0.1 needs a basis far beyond order 3.
  SparseMatrix A = laplacian_1d(400);
  TestRng rng(611);
  Matrix F = random_matrix(rng, 400, 1);
  FactoredMatrix C(F, F);
  FactoredMatrix D = FactoredMatrix::zero(400, 400);
  SolveReport rep =
      solve_projected_dse(A, A.adjoint(), C, D, grid(0.1, 2), 1e-8, 3);
  CHECK_FALSE(rep.converged);
  REQUIRE(rep.factored_snapshots.size() == 3);
  CHECK(is_finite(rep.snapshot_dense(2)));
}

TEST_CASE("shape mismatches are rejected") {
  SparseMatrix A = laplacian_1d(8);
  SparseMatrix B = laplacian_1d(6);
  TestRng rng(612);
  FactoredMatrix C(random_matrix(rng, 8, 1), random_matrix(rng, 6, 1));
  FactoredMatrix badC(random_matrix(rng, 7, 1), random_matrix(rng, 6, 1));
  FactoredMatrix D = FactoredMatrix::zero(8, 6);
  CHECK_THROWS_AS(
      solve_projected_dse(A, B, badC, D, grid(0.1, 2), 1e-8, 10),
      std::invalid_argument);
  CHECK_THROWS_AS(solve_projected_dse(A, B, C, D, {0.5, 1.0}, 1e-8, 10),
                  std::invalid_argument);
}
