#pragma once

#include "diffsylv/core.hpp"

/// Dense complex linear-algebra substrate: eigendecomposition with a
/// diagonalizability gate, matrix exponential, and the Kronecker vec-form
/// oracle used as the independent cross-check for the Sylvester operator.
namespace diffsylv {

/// Eigendecomposition M = U diag(eigenvalues) U^{-1} with the inverse held
/// explicitly and cond_1(U) recorded.
struct EigenDecomposition {
  Matrix eigenvectors;          ///< U, columns are unit-norm eigenvectors
  Vector eigenvalues;           ///< sorted by (Re, Im, first appearance)
  Matrix inverse_eigenvectors;  ///< U^{-1}
  double condition = 0.0;       ///< ||U||_1 * ||U^{-1}||_1
};

/// Default cap on cond_1(U); beyond it the U,V inner-product machinery is
/// numerically meaningless and NotDiagonalizableError is raised.
inline constexpr double kDefaultCondCap = 1e8;

/// Diagonalizes a square complex matrix.
///
/// Eigenvalues come back in a deterministic order (sorted by real part, then
/// imaginary part, ties by first appearance) and each eigenvector's phase is
/// normalized so its largest-magnitude entry is real positive; this makes the
/// downstream Hadamard masks reproducible run to run.
///
/// Throws NotDiagonalizableError when cond_1(U) exceeds cond_cap (defective or
/// near-defective input), std::invalid_argument for non-square/non-finite input.
EigenDecomposition eig(const Matrix& M, double cond_cap = kDefaultCondCap);

/// Matrix exponential e^M by scaling-and-squaring with a Padé approximant of
/// fixed order 13, scaled so ||M/2^s||_1 <= 5.4. Exactly diagonal input is
/// special-cased to entrywise exp so diagonal matrices are exact.
Matrix expm(const Matrix& M);

/// Brute-force Sylvester action via the unrolled Kronecker representation:
/// unvec((I_m ⊗ A + B^T ⊗ I_n) vec(X)) with column-stacking vec.
/// Deliberately shares no code with SylvesterOperator::apply — it is the
/// independent test oracle.
Matrix kron_oracle_apply(const Matrix& A, const Matrix& B, const Matrix& X);

}  // namespace diffsylv
