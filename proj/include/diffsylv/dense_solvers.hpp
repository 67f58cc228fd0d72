#pragma once

#include "diffsylv/factored.hpp"
#include "diffsylv/sylvester_operator.hpp"

#include <functional>
#include <string>
#include <vector>

/// Closed-form dense solvers for the differential Sylvester equation
/// X'(t) = A X(t) + X(t) B + C, X(0) = D, and the algebraic equation
/// A X + X B + C = 0.
namespace diffsylv {

/// A fully specified differential Sylvester problem on a snapshot grid.
struct DseProblem {
  SylvesterOperator op;
  Matrix C;  ///< constant inhomogeneity, n x m
  Matrix D;  ///< initial value, n x m
  std::vector<double> t_grid;  ///< strictly increasing, t_grid[0] = 0
  bool lyapunov = false;  ///< declared Lyapunov mode: snapshots are re-symmetrized

  DseProblem(SylvesterOperator op_, Matrix C_, Matrix D_, std::vector<double> grid,
             bool lyapunov_ = false);
};

/// Result of one solver run. Snapshot storage is dense (closed-form and BDF
/// solvers) or factored (Krylov); exactly one of the two vectors is populated.
///
/// residual_norms semantics per method:
///  - spectral / voc_split / expm_direct / taylor: relative central-difference
///    ODE residual at each snapshot, ||(X(t+h)-X(t-h))/2h - (AX+XB+C)||
///    normalized by ||C||_F + (||A||_F+||B||_F)||X||_F, with
///    h = min(1e-5, 3e-4 / max(1, ||S||)) so the estimate stays meaningful on
///    stiff problems;
///  - bdf: the implicit step's relative algebraic residual at each snapshot
///    (0 at t = 0);
///  - krylov: absolute structured Frobenius residual of the lifted equation.
/// residual_norms_2 is the same quantity measured in the spectral norm.
struct SolveReport {
  std::vector<double> t_grid;
  std::vector<Matrix> snapshots;
  std::vector<FactoredMatrix> factored_snapshots;
  std::string method;
  std::vector<double> residual_norms;
  std::vector<double> residual_norms_2;
  std::vector<double> step_residuals;  ///< bdf only: every internal step
  double wall_time_s = 0.0;
  double cond_uv = 0.0;  ///< cond_1(U) * cond_1(V) when spectral data was used
  bool converged = true;  ///< krylov: residual target met; others always true
  int dim_or_order = 0;   ///< krylov basis dim / taylor max order / bdf order / 0

  std::size_t size() const { return t_grid.size(); }

  /// Snapshot i as a dense matrix regardless of storage kind.
  Matrix snapshot_dense(std::size_t i) const;
};

/// Spectral Hadamard formula:
/// X(t) = U [ e^{t(alpha_i+beta_j)} ⊙ U^{-1}DV^{-H} + phi_ij(t) ⊙ U^{-1}CV^{-H} ] V^H.
/// Works with or without a spectral gap. Throws NotDiagonalizableError.
SolveReport solve_spectral(const DseProblem& p);

/// Variation-of-constants split X(t) = e^{tS}(D) + S^{-1}(-C) - e^{tS}(S^{-1}(-C)).
/// Requires the spectral gap sigma(A) ∩ sigma(-B) = ∅;
/// throws SingularOperatorError when it fails numerically.
SolveReport solve_voc_split(const DseProblem& p);

/// Plain exponential formula X(t) = e^{tA} D e^{tB} + integral term. The
/// integral uses the S^{-1} split when available and falls back to 32-node
/// composite Gauss-Legendre per grid interval when S is singular or the
/// spectral data is unavailable; consequently this solver has no
/// diagonalizability or gap precondition.
SolveReport solve_expm_direct(const DseProblem& p);

/// Algebraic Sylvester solve: returns X with A X + X B + C = 0 via the
/// reciprocal Hadamard mask. Throws SingularOperatorError / NotDiagonalizableError.
Matrix solve_algebraic(const SylvesterOperator& op, const Matrix& C);

/// Shared diagnostics helper: builds a report by sampling `eval` on the grid
/// (timed) and attaching central-difference ODE residuals (untimed). `eval`
/// must be valid slightly outside [0, t_final] for the difference stencil.
/// `setup_seconds` is the caller's already-spent decomposition/preparation
/// time, added to wall_time_s so every method reports the full cost of
/// producing its snapshots (diagnostics stay excluded everywhere).
/// Used by the closed-form solvers and the taylor/bench wrappers.
SolveReport report_from_evaluator(const DseProblem& p, const std::string& method,
                                  const std::function<Matrix(double)>& eval,
                                  double cond_uv, int dim_or_order,
                                  double setup_seconds = 0.0);

}  // namespace diffsylv
