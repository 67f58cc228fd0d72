#include "diffsylv/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace diffsylv {

EigenDecomposition eig(const Matrix& M, double cond_cap) {
  require(M.rows() == M.cols(), "eig: matrix must be square");
  require(M.size() > 0, "eig: matrix must be nonempty");
  require_finite(M, "eig");

  Eigen::ComplexEigenSolver<Matrix> solver(M, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw NotDiagonalizableError("eig: QR iteration failed to converge");
  }

  const Index n = M.rows();
  Vector raw_values = solver.eigenvalues();
  Matrix raw_vectors = solver.eigenvectors();

  // Deterministic order: sort by (Re, Im), stable in the original index.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Complex& za = raw_values(a);
    const Complex& zb = raw_values(b);
    if (za.real() != zb.real()) return za.real() < zb.real();
    return za.imag() < zb.imag();
  });

  EigenDecomposition dec;
  dec.eigenvalues.resize(n);
  dec.eigenvectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    dec.eigenvalues(j) = raw_values(order[static_cast<std::size_t>(j)]);
    dec.eigenvectors.col(j) = raw_vectors.col(order[static_cast<std::size_t>(j)]);
  }

  // Phase normalization: rotate each column so its largest-magnitude entry is
  // real positive (first maximum wins). Keeps masks reproducible.
  for (Index j = 0; j < n; ++j) {
    Index imax = 0;
    double amax = 0.0;
    for (Index i = 0; i < n; ++i) {
      double a = std::abs(dec.eigenvectors(i, j));
      if (a > amax) {
        amax = a;
        imax = i;
      }
    }
    if (amax > 0.0) {
      Complex phase = dec.eigenvectors(imax, j) / amax;
      dec.eigenvectors.col(j) /= phase;
    }
  }

  Eigen::PartialPivLU<Matrix> lu(dec.eigenvectors);
  dec.inverse_eigenvectors = lu.inverse();
  dec.condition = norm1(dec.eigenvectors) * norm1(dec.inverse_eigenvectors);

  if (!is_finite(dec.inverse_eigenvectors) || !(dec.condition <= cond_cap)) {
    std::ostringstream msg;
    msg << "eig: eigenvector matrix condition " << dec.condition
        << " exceeds cap " << cond_cap << " (matrix treated as non-diagonalizable)";
    throw NotDiagonalizableError(msg.str());
  }
  return dec;
}

namespace {

bool exactly_diagonal(const Matrix& M) {
  for (Index j = 0; j < M.cols(); ++j)
    for (Index i = 0; i < M.rows(); ++i)
      if (i != j && M(i, j) != Complex{0.0, 0.0}) return false;
  return true;
}

}  // namespace

Matrix expm(const Matrix& M) {
  require(M.rows() == M.cols(), "expm: matrix must be square");
  require_finite(M, "expm");
  const Index n = M.rows();

  if (exactly_diagonal(M)) {
    Matrix E = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) E(i, i) = std::exp(M(i, i));
    return E;
  }

  // Padé(13) numerator/denominator coefficients (Higham 2005).
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  constexpr double theta = 5.4;

  int s = 0;
  double nrm = norm1(M);
  if (nrm > theta) s = static_cast<int>(std::ceil(std::log2(nrm / theta)));
  Matrix A = M / std::pow(2.0, s);

  const Matrix I = Matrix::Identity(n, n);
  Matrix A2 = A * A;
  Matrix A4 = A2 * A2;
  Matrix A6 = A2 * A4;
  Matrix U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) +
                  b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  Matrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) +
             b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;

  Matrix F = Eigen::PartialPivLU<Matrix>(V - U).solve(V + U);
  for (int k = 0; k < s; ++k) F = F * F;
  return F;
}

Matrix kron_oracle_apply(const Matrix& A, const Matrix& B, const Matrix& X) {
  require(A.rows() == A.cols(), "kron_oracle_apply: A must be square");
  require(B.rows() == B.cols(), "kron_oracle_apply: B must be square");
  require(X.rows() == A.rows() && X.cols() == B.rows(),
          "kron_oracle_apply: X must be n x m conformal with A, B");
  const Index n = A.rows();
  const Index m = B.rows();

  // K = I_m ⊗ A + B^T ⊗ I_n acting on vec(X) (columns stacked):
  //   K[(j*n + i), (l*n + k)] = delta_{jl} A(i,k) + delta_{ik} B(l,j).
  Matrix K = Matrix::Zero(n * m, n * m);
  for (Index j = 0; j < m; ++j) K.block(j * n, j * n, n, n) += A;
  for (Index j = 0; j < m; ++j)
    for (Index l = 0; l < m; ++l)
      for (Index i = 0; i < n; ++i) K(j * n + i, l * n + i) += B(l, j);

  Vector x(n * m);
  for (Index j = 0; j < m; ++j) x.segment(j * n, n) = X.col(j);
  Vector y = K * x;
  Matrix Y(n, m);
  for (Index j = 0; j < m; ++j) Y.col(j) = y.segment(j * n, n);
  return Y;
}

}  // namespace diffsylv
