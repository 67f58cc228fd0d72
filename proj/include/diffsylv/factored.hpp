#pragma once

#include "diffsylv/core.hpp"

/// Low-rank factor pair representing F1 * F2^H. Rank 0 encodes the zero
/// matrix of the recorded shape (factors with zero columns).
namespace diffsylv {

class FactoredMatrix {
 public:
  FactoredMatrix() = default;

  FactoredMatrix(Matrix f1, Matrix f2) : F1_(std::move(f1)), F2_(std::move(f2)) {
    require(F1_.cols() == F2_.cols(), "FactoredMatrix: factor ranks differ");
    require_finite(F1_, "FactoredMatrix F1");
    require_finite(F2_, "FactoredMatrix F2");
  }

  /// Zero matrix of shape rows x cols (rank-0 factors).
  static FactoredMatrix zero(Index rows, Index cols) {
    return FactoredMatrix(Matrix(rows, 0), Matrix(cols, 0));
  }

  Index rows() const { return F1_.rows(); }
  Index cols() const { return F2_.rows(); }
  Index rank() const { return F1_.cols(); }
  bool is_zero() const { return rank() == 0; }

  const Matrix& F1() const { return F1_; }
  const Matrix& F2() const { return F2_; }

  Matrix dense() const {
    if (rank() == 0) return Matrix::Zero(rows(), cols());
    return F1_ * F2_.adjoint();
  }

  /// ||F1 F2^H||_F via the rank x rank Gramians; never forms the dense product.
  double norm_fro() const {
    if (rank() == 0) return 0.0;
    Matrix G1 = F1_.adjoint() * F1_;
    Matrix G2 = F2_.adjoint() * F2_;
    double s = (G1 * G2).trace().real();
    return std::sqrt(std::max(0.0, s));
  }

 private:
  Matrix F1_;  // rows() x rank()
  Matrix F2_;  // cols() x rank()
};

}  // namespace diffsylv
