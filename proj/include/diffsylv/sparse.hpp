#pragma once

#include "diffsylv/core.hpp"

#include <Eigen/SparseCore>

#include <string>
#include <vector>

/// Coordinate-built sparse matrix for the large-scale Krylov path. Duplicate
/// (row, col) entries are summed during construction (the normalization that
/// establishes the no-duplicates invariant).
namespace diffsylv {

class SparseMatrix {
 public:
  SparseMatrix() = default;

  SparseMatrix(Index rows, Index cols, const std::vector<Eigen::Triplet<Complex>>& entries);

  /// Reads a Matrix Market file (coordinate or array).
  static SparseMatrix from_matrix_market(const std::string& path);

  static SparseMatrix from_dense(const Matrix& M);

  Index rows() const { return mat_.rows(); }
  Index cols() const { return mat_.cols(); }
  Index nonzeros() const { return mat_.nonZeros(); }

  /// A * X for a dense block X.
  Matrix apply(const Matrix& X) const;

  SparseMatrix adjoint() const;
  Matrix dense() const { return Matrix(mat_); }

  double norm1() const;  ///< max absolute column sum
  double norm_fro() const { return mat_.norm(); }

  const Eigen::SparseMatrix<Complex>& eigen() const { return mat_; }

 private:
  Eigen::SparseMatrix<Complex> mat_;
};

}  // namespace diffsylv
