#pragma once

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

/// Core value types and error taxonomy shared by every module.
///
/// All numerics run over complex<double>: eigenvalues of real nonsymmetric
/// matrices are complex, so keeping a single scalar type avoids a parallel
/// real-path API.
namespace diffsylv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// The eigenvector matrix of A or B^H is too ill-conditioned for the
/// spectral machinery (cond_1(U) above the configured cap, default 1e8).
class NotDiagonalizableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Sylvester operator has (numerically) zero eigenvalues alpha_i + beta_j,
/// i.e. the spectra of A and -B intersect; S^{-1} and steady states do not exist.
class SingularOperatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Block Arnoldi was handed a numerically zero seed block.
class ZeroSeedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// order_for_tolerance hit the truncation-order cap before the Taylor tail
/// bound dropped below the requested tolerance.
class SeriesTooLongError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The benchmark harness has no feasible reference: the problem exceeds the
/// dense cap and no reference snapshot directory was supplied.
class ReferenceInfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// True iff every entry of M is finite (no NaN / Inf).
inline bool is_finite(const Matrix& M) { return M.allFinite(); }

/// Throws std::invalid_argument unless cond holds.
inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

/// Throws std::invalid_argument if M contains NaN/Inf entries.
inline void require_finite(const Matrix& M, const std::string& what) {
  require(is_finite(M), what + ": matrix has non-finite entries");
}

/// Frobenius inner product <X, Y> = sum_ij X_ij * conj(Y_ij).
inline Complex frobenius_inner(const Matrix& X, const Matrix& Y) {
  return X.cwiseProduct(Y.conjugate()).sum();
}

/// ||got - want||_F / ||want||_F, with a floor so a zero reference does not
/// divide by zero (returns ||got||_F scaled by 1e300-safe tiny in that case,
/// i.e. 0 when both vanish).
inline double rel_error_fro(const Matrix& got, const Matrix& want) {
  double den = want.norm();
  double num = (got - want).norm();
  if (den == 0.0) return num == 0.0 ? 0.0 : num / std::numeric_limits<double>::min();
  return num / den;
}

/// Matrix 1-norm (max absolute column sum).
inline double norm1(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return M.cwiseAbs().colwise().sum().maxCoeff();
}

/// Spectral norm (largest singular value); dense SVD, intended for the
/// small/medium matrices this library traffics in.
inline double norm2(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
}

}  // namespace diffsylv
