#pragma once

#include "diffsylv/dense_solvers.hpp"

/// Truncated Taylor-series solver
///   X(t) = D + sum_{k>=1} t^k/k! (S^k(D) + S^{k-1}(C)),
/// in direct operator-power form and in the factored block form, plus the
/// a-priori tail bound and an order-selection policy that inverts it.
namespace diffsylv {

/// Truncation orders: the D-series keeps k <= m1, the C-series k <= m2.
struct TaylorOrder {
  int m1 = 0;
  int m2 = 0;
};

/// Direct evaluation with iteratively accumulated operator powers; the
/// coefficients t^k/k! are built by incremental multiplication with t/k.
Matrix taylor_direct(const DseProblem& p, TaylorOrder ord, double t);

/// Factored block form: with D = D1 D2^H the D-part is
///   sum_{p+q <= m1} t^{p+q}/(p+q)! binom(p+q, q) (A^p D1)(B^H)^q D2)^H
/// and the C-part uses t^{p+q+1}/(p+q+1)! binom(p+q, q) over p+q <= m2-1.
/// The coefficient t^k/k! binom(k,q) is accumulated as tau_p tau_q with
/// tau_i = t^i/i! (identical value, overflow-free); the anti-triangular
/// coefficient matrix is applied blockwise rather than Kronecker-expanded —
/// the equivalence of the two forms is a tested invariant.
Matrix taylor_factored(const FactoredMatrix& D, const FactoredMatrix& C,
                       const Matrix& A, const Matrix& B, TaylorOrder ord, double t);

/// A-priori truncation bound
///   sum_{k>m1} (|t|^k/k!) op_norm^k normD + sum_{k>m2} (|t|^k/k!) op_norm^{k-1} normC,
/// valid when op_norm comes from operator_norm and the norms are ||.||_{U,V}
/// (any submultiplicatively compatible pairing works; Frobenius inputs give a
/// valid bound only after rescaling by the cond(U) cond(V) factors).
/// Each tail is summed until terms drop below 1e-18 of the running tail,
/// always continuing through the growing regime k <= |t| op_norm.
double tail_bound(double op_norm, double normD, double normC, TaylorOrder ord, double t);

/// Smallest (m1, m2) with tail_bound <= tol under a greedy policy: start at
/// (0, 0) and repeatedly increment whichever series currently has the larger
/// tail (ties favor m1). Each order is capped at 500; hitting a cap raises
/// SeriesTooLongError. Requires tol > 0.
TaylorOrder order_for_tolerance(double op_norm, double normD, double normC,
                                double t, double tol);

/// Convenience driver used by the benchmark harness: picks orders via
/// order_for_tolerance at the final grid time (in the (U,V) norms), evaluates
/// taylor_direct on the grid and packages a SolveReport with FD diagnostics.
SolveReport solve_taylor(const DseProblem& p, double tol);

}  // namespace diffsylv
