#include "diffsylv/krylov.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

namespace diffsylv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Orthonormalizes the columns of W against the first k columns of Q (and
// against each other) by modified Gram-Schmidt with one full
// reorthogonalization pass, appending survivors to Q in place. Columns whose
// post-orthogonalization norm is below defl_tol are deflated. Returns the
// number of accepted columns; never grows the basis past Q's capacity (at
// capacity the candidates are linearly dependent up to roundoff anyway).
Index orthonormalize_block(Matrix& Q, Index& k, const Matrix& W, double defl_tol) {
  Index accepted = 0;
  for (Index c = 0; c < W.cols(); ++c) {
    if (k == Q.cols()) break;
    Vector w = W.col(c);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < k; ++i) {
        w -= Q.col(i) * Q.col(i).dot(w);
      }
    }
    double nrm = w.norm();
    if (nrm < defl_tol) continue;
    Q.col(k) = w / nrm;
    ++k;
    ++accepted;
  }
  return accepted;
}

// Stacked low-rank factors of the lifted residual
//   R = G_A Y Q_B^H + Q_A Y G_B^H + C_1 C_2^H - (P_A C_1)(P_B C_2)^H,
// followed by ||R||_F and ||R||_2 read off the product of the two QR
// R-factors. Nothing of size n x m is ever formed.
std::pair<double, double> residual_pair(const SparseMatrix& A, const SparseMatrix& B,
                                        const KrylovBasis& basisA,
                                        const KrylovBasis& basisB, const Matrix& Y,
                                        const FactoredMatrix& C) {
  const Matrix& QA = basisA.Q;
  const Matrix& QB = basisB.Q;
  const Index n = QA.rows();
  const Index m = QB.rows();
  require(A.rows() == A.cols() && A.rows() == n, "residual_estimate: A/basisA mismatch");
  require(B.rows() == B.cols() && B.rows() == m, "residual_estimate: B/basisB mismatch");
  require(Y.rows() == QA.cols() && Y.cols() == QB.cols(),
          "residual_estimate: Y must be k_A x k_B");
  require(C.rows() == n && C.cols() == m, "residual_estimate: C shape mismatch");

  const Index kB = QB.cols();
  const Index r = C.rank();
  const Index K = 2 * kB + 2 * r;
  if (K == 0) return {0.0, 0.0};

  Matrix GA = A.apply(QA) - QA * basisA.H_proj;
  Matrix GB = (QB.adjoint() * B.eigen()).adjoint() - QB * basisB.H_proj;

  Matrix L(n, K);
  Matrix R(m, K);
  L.leftCols(kB) = GA * Y;
  R.leftCols(kB) = QB;
  L.middleCols(kB, kB) = QA * Y;
  R.middleCols(kB, kB) = GB;
  if (r > 0) {
    L.middleCols(2 * kB, r) = C.F1();
    R.middleCols(2 * kB, r) = C.F2();
    L.rightCols(r) = -(QA * (QA.adjoint() * C.F1()));
    R.rightCols(r) = QB * (QB.adjoint() * C.F2());
  }

  Eigen::HouseholderQR<Matrix> qrL(L);
  Eigen::HouseholderQR<Matrix> qrR(R);
  Matrix RL = qrL.matrixQR().topRows(std::min(n, K)).triangularView<Eigen::Upper>();
  Matrix RR = qrR.matrixQR().topRows(std::min(m, K)).triangularView<Eigen::Upper>();
  Matrix S = RL * RR.adjoint();
  return {S.norm(), norm2(S)};
}

// Hermitian Y factored as L L^H with negative eigenvalues (roundoff-level in
// Lyapunov mode) clipped to zero.
Matrix psd_factor(const Matrix& Y) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Y);
  require(es.info() == Eigen::Success, "psd_factor: eigensolver failed");
  Vector sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<Complex>();
  return es.eigenvectors() * sq.asDiagonal();
}

}  // namespace

KrylovBasis block_arnoldi(const SparseMatrix& A, const Matrix& seed, int steps) {
  require(A.rows() == A.cols(), "block_arnoldi: A must be square");
  require(seed.rows() == A.rows(), "block_arnoldi: seed rows must match A");
  require(seed.cols() >= 1, "block_arnoldi: seed needs at least one column");
  require(steps >= 0, "block_arnoldi: steps must be nonnegative");
  require_finite(seed, "block_arnoldi seed");

  const Index n = A.rows();
  const double seed_norm = seed.norm();
  if (!(seed_norm > 0.0)) {
    throw ZeroSeedError("block_arnoldi: seed block is numerically zero");
  }
  const double defl_tol = 1e-12 * seed_norm;

  const Index capacity =
      std::min<Index>(n, static_cast<Index>(steps + 1) * seed.cols());
  Matrix Q(n, capacity);
  Index k = 0;

  Index block_start = 0;
  Index width = orthonormalize_block(Q, k, seed, defl_tol);
  if (width == 0) {
    throw ZeroSeedError("block_arnoldi: seed block is numerically zero");
  }

  KrylovBasis basis;
  basis.block_width = width;
  basis.order = 0;
  for (int j = 1; j <= steps; ++j) {
    Matrix W = A.apply(Q.block(0, block_start, n, width));
    block_start = k;
    width = orthonormalize_block(Q, k, W, defl_tol);
    if (width == 0) break;  // invariant subspace reached; nothing new to add
    basis.block_width = width;
    basis.order = j;
  }

  basis.Q = Q.leftCols(k);
  basis.H_proj = basis.Q.adjoint() * A.apply(basis.Q);
  return basis;
}

double residual_estimate(const SparseMatrix& A, const SparseMatrix& B,
                         const KrylovBasis& basisA, const KrylovBasis& basisB,
                         const Matrix& Y, const FactoredMatrix& C, double t) {
  static_cast<void>(t);  // R(t) depends on t only through Y; t labels the snapshot
  return residual_pair(A, B, basisA, basisB, Y, C).first;
}

ProjectedSolution solve_projected_dse_detailed(const SparseMatrix& A,
                                               const SparseMatrix& B,
                                               const FactoredMatrix& C,
                                               const FactoredMatrix& D,
                                               const std::vector<double>& t_grid,
                                               double tol, int max_order) {
  Clock::time_point t0 = Clock::now();
  const Index n = A.rows();
  const Index m = B.rows();
  require(A.rows() == A.cols(), "solve_projected_dse: A must be square");
  require(B.rows() == B.cols(), "solve_projected_dse: B must be square");
  require(C.rows() == n && C.cols() == m, "solve_projected_dse: C must be n x m");
  require(D.rows() == n && D.cols() == m, "solve_projected_dse: D must be n x m");
  require(tol > 0.0, "solve_projected_dse: tol must be positive");
  require(max_order >= 0, "solve_projected_dse: max_order must be nonnegative");
  require(!t_grid.empty() && t_grid.front() == 0.0,
          "solve_projected_dse: t_grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    require(std::isfinite(t_grid[i]) && t_grid[i] > t_grid[i - 1],
            "solve_projected_dse: t_grid must be strictly increasing and finite");
  }

  // Lyapunov detection: B = A^H and both factor pairs coincide, so one basis
  // serves both sides and the projected problem keeps the structure.
  bool lyap = (n == m);
  if (lyap) {
    Eigen::SparseMatrix<Complex> diff = B.eigen() - Eigen::SparseMatrix<Complex>(A.eigen().adjoint());
    lyap = diff.norm() <= 1e-14 * std::max(1.0, A.norm_fro()) &&
           (C.F1() - C.F2()).norm() <= 1e-14 * std::max(1.0, C.F1().norm()) &&
           (D.F1() - D.F2()).norm() <= 1e-14 * std::max(1.0, D.F1().norm());
  }

  // Combined block seeds [D_1, C_1] under A and [D_2, C_2] under B^H.
  Matrix seedA(n, D.rank() + C.rank());
  seedA.leftCols(D.rank()) = D.F1();
  seedA.rightCols(C.rank()) = C.F1();
  Matrix seedB(m, D.rank() + C.rank());
  seedB.leftCols(D.rank()) = D.F2();
  seedB.rightCols(C.rank()) = C.F2();

  ProjectedSolution sol;
  sol.lyapunov = lyap;
  SolveReport& rep = sol.report;
  rep.method = "krylov";
  rep.t_grid = t_grid;

  if (seedA.cols() == 0 || seedA.norm() == 0.0 || seedB.norm() == 0.0) {
    // C = D = 0: the solution is identically zero, no iterations needed.
    sol.Y.assign(t_grid.size(), Matrix::Zero(0, 0));
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      rep.factored_snapshots.push_back(FactoredMatrix::zero(n, m));
      rep.residual_norms.push_back(0.0);
      rep.residual_norms_2.push_back(0.0);
    }
    rep.converged = true;
    rep.dim_or_order = 0;
    rep.wall_time_s = seconds_since(t0);
    return sol;
  }

  const double threshold = tol * (C.norm_fro() + D.norm_fro() * A.norm1());
  const SparseMatrix BH = B.adjoint();

  Index prev_total = -1;
  for (int order = 0; order <= max_order; ++order) {
    sol.basisA = block_arnoldi(A, seedA, order);
    sol.basisB = lyap ? sol.basisA : block_arnoldi(BH, seedB, order);
    const Index total =
        sol.basisA.dimension() + (lyap ? 0 : sol.basisB.dimension());
    const bool stagnant = (total == prev_total);  // bases stopped growing
    prev_total = total;

    Matrix At = sol.basisA.H_proj;
    Matrix Bt = sol.basisB.H_proj.adjoint();  // Q_B^H B Q_B from the B^H basis
    Matrix Ct = Matrix::Zero(At.rows(), Bt.rows());
    if (C.rank() > 0) {
      Ct = (sol.basisA.Q.adjoint() * C.F1()) * (sol.basisB.Q.adjoint() * C.F2()).adjoint();
    }
    Matrix Dt = Matrix::Zero(At.rows(), Bt.rows());
    if (D.rank() > 0) {
      Dt = (sol.basisA.Q.adjoint() * D.F1()) * (sol.basisB.Q.adjoint() * D.F2()).adjoint();
    }

    DseProblem small(SylvesterOperator(std::move(At), std::move(Bt)), std::move(Ct),
                     std::move(Dt), t_grid, lyap);
    SolveReport inner;
    try {
      inner = solve_spectral(small);
    } catch (const NotDiagonalizableError&) {
      inner = solve_expm_direct(small);
    }

    sol.Y = std::move(inner.snapshots);
    rep.cond_uv = inner.cond_uv;
    rep.residual_norms.clear();
    rep.residual_norms_2.clear();
    for (const Matrix& Yi : sol.Y) {
      auto [fro, two] = residual_pair(A, B, sol.basisA, sol.basisB, Yi, C);
      rep.residual_norms.push_back(fro);
      rep.residual_norms_2.push_back(two);
    }
    const double final_res = rep.residual_norms.back();
    sol.residual_history.push_back(final_res);
    rep.converged = final_res <= threshold;
    rep.dim_or_order = static_cast<int>(total);
    if (rep.converged || stagnant) break;
  }

  rep.factored_snapshots.clear();
  rep.factored_snapshots.reserve(sol.Y.size());
  for (const Matrix& Yi : sol.Y) {
    if (lyap) {
      Matrix F = sol.basisA.Q * psd_factor(Yi);
      rep.factored_snapshots.emplace_back(F, F);
    } else {
      rep.factored_snapshots.emplace_back(sol.basisA.Q * Yi, sol.basisB.Q);
    }
  }
  rep.wall_time_s = seconds_since(t0);
  return sol;
}

SolveReport solve_projected_dse(const SparseMatrix& A, const SparseMatrix& B,
                                const FactoredMatrix& C, const FactoredMatrix& D,
                                const std::vector<double>& t_grid, double tol,
                                int max_order) {
  return solve_projected_dse_detailed(A, B, C, D, t_grid, tol, max_order).report;
}

double galerkin_norm(const SparseMatrix& A, const SparseMatrix& B,
                     const ProjectedSolution& sol, const FactoredMatrix& C,
                     std::size_t snapshot_index) {
  const Matrix& QA = sol.basisA.Q;
  const Matrix& QB = sol.basisB.Q;
  const Matrix& Y = sol.Y.at(snapshot_index);
  if (QA.cols() == 0 || QB.cols() == 0 || Y.size() == 0) return 0.0;

  Matrix GA = A.apply(QA) - QA * sol.basisA.H_proj;
  Matrix GB = (QB.adjoint() * B.eigen()).adjoint() - QB * sol.basisB.H_proj;
  Matrix IA = QA.adjoint() * QA;  // = I up to orthonormality defect
  Matrix IB = QB.adjoint() * QB;
  Matrix M = (QA.adjoint() * GA) * Y * IB + IA * Y * (QB.adjoint() * GB).adjoint();
  if (C.rank() > 0) {
    Matrix c1 = QA.adjoint() * C.F1();
    Matrix c2 = QB.adjoint() * C.F2();
    M += c1 * c2.adjoint() - (IA * c1) * (IB * c2).adjoint();
  }
  return M.norm();
}

}  // namespace diffsylv
