#pragma once

#include "diffsylv/dense_solvers.hpp"
#include "diffsylv/sparse.hpp"

#include <vector>

/// Large-scale solver: block Krylov bases grown from the factored data,
/// Galerkin projection of the differential equation onto the small space,
/// dense solve of the projected problem, low-rank lift-back, and a structured
/// residual estimate that drives the order control.
namespace diffsylv {

/// Orthonormal block Krylov basis for one coefficient (A on the left, B^H on
/// the right) together with the projected coefficients.
struct KrylovBasis {
  Matrix Q;       ///< n x k, orthonormal columns
  Matrix H_proj;  ///< k x k projection Q^H M Q of the generating matrix M
  Index block_width = 0;  ///< columns accepted in the last (possibly deflated) block
  int order = 0;          ///< block steps actually performed (< steps on breakdown)

  Index dimension() const { return Q.cols(); }
};

/// Block Arnoldi for K_{steps+1}(A, seed) = span{seed, A seed, ..., A^steps seed}.
/// Modified Gram-Schmidt with one full reorthogonalization pass; columns whose
/// post-orthogonalization norm falls below 1e-12 * ||seed||_F are deflated and
/// the block width shrinks. Stops early when a block deflates away entirely
/// (invariant subspace reached). Throws ZeroSeedError for a numerically zero
/// seed.
KrylovBasis block_arnoldi(const SparseMatrix& A, const Matrix& seed, int steps);

/// Frobenius norm of the lifted-equation residual
///   R = A Q_A Y Q_B^H + Q_A Y Q_B^H B + C - Q_A (A~ Y + Y B~ + C~) Q_B^H
/// evaluated through its low-rank-plus-cross structure: with the Arnoldi gap
/// matrices G_A = A Q_A - Q_A H_A and G_B = B^H Q_B - Q_B H_B,
///   R = G_A Y Q_B^H + Q_A Y G_B^H + C_1 C_2^H - (Q_A Q_A^H C_1)(Q_B Q_B^H C_2)^H,
/// and the norm is read off a small product of stacked QR factors; no n x m
/// dense intermediate is formed. The residual depends on t only through Y;
/// the time argument labels which snapshot Y belongs to.
double residual_estimate(const SparseMatrix& A, const SparseMatrix& B,
                         const KrylovBasis& basisA, const KrylovBasis& basisB,
                         const Matrix& Y, const FactoredMatrix& C, double t);

/// Projection solver for X' = AX + XB + C, X(0) = D with factored C, D.
///
/// Builds the left basis from seed [D_1, C_1] under A and the right basis from
/// seed [D_2, C_2] under B^H (a single shared basis when the problem is
/// detected to be Lyapunov: B = A^H and both factor pairs coincide). The
/// projected k x k problem is solved by solve_spectral (solve_expm_direct when
/// the projected coefficients are numerically non-diagonalizable), snapshots
/// are stored factored as X(t) ~ Q_A Y(t) Q_B^H, and the order grows by one
/// block until the final-time residual drops below
/// tol * (||C||_F + ||D||_F * ||A||_1) or max_order is reached. On
/// non-convergence the best iterate is returned with converged = false.
SolveReport solve_projected_dse(const SparseMatrix& A, const SparseMatrix& B,
                                const FactoredMatrix& C, const FactoredMatrix& D,
                                const std::vector<double>& t_grid, double tol,
                                int max_order);

/// Everything solve_projected_dse knows, for diagnostics and verification:
/// the accepted bases, the projected snapshots Y(t_i), and the per-order
/// final-time residual history of the growth loop.
struct ProjectedSolution {
  KrylovBasis basisA;
  KrylovBasis basisB;  ///< identical to basisA in Lyapunov mode
  std::vector<Matrix> Y;
  bool lyapunov = false;
  std::vector<double> residual_history;  ///< final-time residual per order tried
  SolveReport report;
};

ProjectedSolution solve_projected_dse_detailed(const SparseMatrix& A,
                                               const SparseMatrix& B,
                                               const FactoredMatrix& C,
                                               const FactoredMatrix& D,
                                               const std::vector<double>& t_grid,
                                               double tol, int max_order);

/// ||Q_A^H R(t_i) Q_B||_F, the Galerkin orthogonality defect of snapshot i
/// (analytically zero; roundoff-level when the projection is consistent).
double galerkin_norm(const SparseMatrix& A, const SparseMatrix& B,
                     const ProjectedSolution& sol, const FactoredMatrix& C,
                     std::size_t snapshot_index);

}  // namespace diffsylv
