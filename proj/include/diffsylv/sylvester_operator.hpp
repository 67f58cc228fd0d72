#pragma once

#include "diffsylv/core.hpp"

#include <memory>
#include <mutex>
#include <utility>

/// The Sylvester operator S(X) = AX + XB on n x m matrices, its H/V splitting,
/// the (U, V)-weighted inner product under which S is normal, the adjoint, and
/// the Hadamard-mask functional calculus built on the spectral decompositions
/// A = U D_A U^{-1} and B^H = V D_{B^H} V^{-1}.
namespace diffsylv {

/// Spectral data backing the functional calculus. V holds eigenvectors of B^H;
/// beta are eigenvalues of B (conjugates of the D_{B^H} entries), so the
/// operator's eigenvalues are alpha_i + beta_j.
struct SpectralData {
  Matrix U;      ///< eigenvectors of A
  Matrix U_inv;  ///< U^{-1}
  Vector alpha;  ///< eigenvalues of A
  Matrix V;      ///< eigenvectors of B^H
  Matrix V_inv;  ///< V^{-1}
  Vector beta;   ///< eigenvalues of B
  double cond_U = 0.0;  ///< cond_1(U)
  double cond_V = 0.0;  ///< cond_1(V)

  Index n() const { return alpha.size(); }
  Index m() const { return beta.size(); }
};

class SylvesterOperator {
 public:
  /// A must be n x n, B m x m; the operator acts on n x m matrices.
  SylvesterOperator(Matrix A, Matrix B);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  Index n() const { return A_.rows(); }
  Index m() const { return B_.rows(); }

  /// S(X) = AX + XB.
  Matrix apply(const Matrix& X) const;

  /// (H(X), V(X)) = (AX, XB); the two halves commute: H(V(X)) = V(H(X)).
  std::pair<Matrix, Matrix> split_apply(const Matrix& X) const;

  /// Lazily computed spectral data, shared by copies of this operator;
  /// materialization is race-free and happens at most once (a failure is
  /// also cached and rethrown). Throws NotDiagonalizableError.
  const SpectralData& spectral() const;

 private:
  Matrix A_;
  Matrix B_;
  struct Cache {
    std::once_flag once;
    SpectralData data;
    std::exception_ptr error;
  };
  std::shared_ptr<Cache> cache_;
};

/// <X, Y>_{U,V} = <U^{-1} X V^{-H}, U^{-1} Y V^{-H}>_F: linear in X,
/// conjugate-linear in Y, positive definite.
Complex inner_product_uv(const SpectralData& spec, const Matrix& X, const Matrix& Y);

/// Norm induced by inner_product_uv.
double norm_uv(const SpectralData& spec, const Matrix& X);

/// Adjoint of S with respect to <.,.>_{U,V}:
/// S*(X) = U conj(D_A) U^{-1} X + X V^{-H} D_{B^H} V^H.
Matrix adjoint_apply(const SylvesterOperator& op, const Matrix& X);

/// Hadamard functional calculus: U (mask ⊙ (U^{-1} X V^{-H})) V^H.
/// mask (alpha_i + beta_j) reproduces S, exp-masks give e^{tS}, reciprocal
/// masks give S^{-1}.
Matrix spectral_apply(const SpectralData& spec, const Matrix& mask, const Matrix& X);

/// Operator norm induced by ||.||_{U,V}: max_{i,j} |alpha_i + beta_j|.
double operator_norm(const SpectralData& spec);

/// Mask builders (n x m arrays over the eigenvalue sums z_ij = alpha_i + beta_j).
Matrix sum_mask(const SpectralData& spec);          ///< z_ij
Matrix exp_mask(const SpectralData& spec, double t);  ///< e^{t z_ij}

/// phi_ij(t) = (e^{t z} - 1)/z, switching to a 4-term Taylor expansion of
/// (e^w - 1)/w when |z t| < 1e-8 (covers the exact z = 0 branch, phi = t).
Matrix integral_mask(const SpectralData& spec, double t);

/// 1/z_ij; throws SingularOperatorError when any |z_ij| <= 1e-12 * operator_norm.
Matrix inverse_mask(const SpectralData& spec);

}  // namespace diffsylv
