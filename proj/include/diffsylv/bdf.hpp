#pragma once

#include "diffsylv/dense_solvers.hpp"

#include <vector>

/// Backward differentiation formulas of orders 1-6 for the differential
/// Sylvester/Lyapunov equation. Each implicit step
///   sum_j alpha_j X_{n-j} = h beta (S(X_n) + C)
/// is rearranged into one algebraic Sylvester solve with the shifted operator
/// ((h beta) A - I/2, (h beta) B - I/2); the even split of the identity
/// between the two coefficients is arbitrary and fixed here once.
namespace diffsylv {

/// Normalized BDF coefficients: alpha has length order+1 with alpha[0] = 1,
/// and sum_j alpha[j] X_{n-j} = h * beta * F(X_n).
struct BdfCoefficients {
  RealVector alpha;
  double beta = 0.0;
};

/// How the first order-1 steps of a BDF(order) run are produced.
enum class BdfStartup {
  Ramp,   ///< self-starting: BDF1, BDF2, ... up to the target order
  Exact,  ///< spectral solution at the startup nodes (for clean order studies)
};

struct BdfConfig {
  int order = 2;            ///< in [1, 6] (zero-stability bound)
  double step_size = 1e-2;  ///< uniform h > 0
  BdfStartup startup = BdfStartup::Ramp;
};

/// Coefficient table, exact rationals rendered to double.
/// Throws std::invalid_argument outside 1 <= order <= 6.
BdfCoefficients bdf_coefficients(int order);

/// One implicit step. history holds the `cfg.order` previous snapshots, most
/// recent first; returns X_n solving
///   (h beta A - I/2) X + X (h beta B - I/2) + (h beta C - sum_{j>=1} alpha_j X_{n-j}) = 0.
/// Throws SingularOperatorError when 1/(h beta) hits the spectrum of S (the
/// step size must change), NotDiagonalizableError from the inner solve.
Matrix bdf_step(const SylvesterOperator& op, const Matrix& C,
                const std::vector<Matrix>& history, const BdfConfig& cfg);

/// Fixed-step integration over p.t_grid (every grid point must be an integer
/// multiple of cfg.step_size). Startup per cfg, then constant-order stepping;
/// snapshots are recorded on the grid, step_residuals holds every internal
/// step's relative algebraic residual, and each snapshot's residual_norms
/// entry is the residual of the step that produced it (zero at t = 0 and for
/// startup nodes that were warm-started). The shifted operator per order is
/// built once and its spectral data reused across all steps.
SolveReport bdf_integrate(const DseProblem& p, const BdfConfig& cfg);

}  // namespace diffsylv
