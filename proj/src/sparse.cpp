#include "diffsylv/sparse.hpp"

#include "diffsylv/matrix_io.hpp"

namespace diffsylv {

SparseMatrix::SparseMatrix(Index rows, Index cols,
                           const std::vector<Eigen::Triplet<Complex>>& entries) {
  require(rows >= 0 && cols >= 0, "SparseMatrix: negative dimensions");
  for (const auto& e : entries) {
    require(e.row() >= 0 && e.row() < rows && e.col() >= 0 && e.col() < cols,
            "SparseMatrix: entry index out of range");
    require(std::isfinite(e.value().real()) && std::isfinite(e.value().imag()),
            "SparseMatrix: nonfinite entry");
  }
  mat_.resize(rows, cols);
  mat_.setFromTriplets(entries.begin(), entries.end());  // sums duplicates
  mat_.makeCompressed();
}

SparseMatrix SparseMatrix::from_matrix_market(const std::string& path) {
  CooData coo = read_matrix_market(path);
  return SparseMatrix(coo.rows, coo.cols, coo.entries);
}

SparseMatrix SparseMatrix::from_dense(const Matrix& M) {
  std::vector<Eigen::Triplet<Complex>> trips;
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      if (M(i, j) != Complex(0.0, 0.0)) {
        trips.emplace_back(static_cast<int>(i), static_cast<int>(j), M(i, j));
      }
    }
  }
  return SparseMatrix(M.rows(), M.cols(), trips);
}

Matrix SparseMatrix::apply(const Matrix& X) const {
  require(X.rows() == mat_.cols(), "SparseMatrix::apply: dimension mismatch");
  return mat_ * X;
}

SparseMatrix SparseMatrix::adjoint() const {
  SparseMatrix out;
  out.mat_ = mat_.adjoint();
  out.mat_.makeCompressed();
  return out;
}

double SparseMatrix::norm1() const {
  double best = 0.0;
  for (Index j = 0; j < mat_.outerSize(); ++j) {
    double col = 0.0;
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(mat_, j); it; ++it) {
      col += std::abs(it.value());
    }
    best = std::max(best, col);
  }
  return best;
}

}  // namespace diffsylv
