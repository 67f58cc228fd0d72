#include "diffsylv/sylvester_operator.hpp"

#include "diffsylv/linalg.hpp"

#include <cmath>
#include <sstream>

namespace diffsylv {

SylvesterOperator::SylvesterOperator(Matrix A, Matrix B)
    : A_(std::move(A)), B_(std::move(B)), cache_(std::make_shared<Cache>()) {
  require(A_.rows() == A_.cols(), "SylvesterOperator: A must be square");
  require(B_.rows() == B_.cols(), "SylvesterOperator: B must be square");
  require(A_.size() > 0 && B_.size() > 0, "SylvesterOperator: empty matrix");
  require_finite(A_, "SylvesterOperator A");
  require_finite(B_, "SylvesterOperator B");
}

Matrix SylvesterOperator::apply(const Matrix& X) const {
  require(X.rows() == n() && X.cols() == m(),
          "SylvesterOperator::apply: X must be n x m");
  return A_ * X + X * B_;
}

std::pair<Matrix, Matrix> SylvesterOperator::split_apply(const Matrix& X) const {
  require(X.rows() == n() && X.cols() == m(),
          "SylvesterOperator::split_apply: X must be n x m");
  return {A_ * X, X * B_};
}

const SpectralData& SylvesterOperator::spectral() const {
  std::call_once(cache_->once, [this] {
    try {
      SpectralData s;
      EigenDecomposition da = eig(A_);
      EigenDecomposition dbh = eig(B_.adjoint());
      s.U = std::move(da.eigenvectors);
      s.U_inv = std::move(da.inverse_eigenvectors);
      s.alpha = std::move(da.eigenvalues);
      s.V = std::move(dbh.eigenvectors);
      s.V_inv = std::move(dbh.inverse_eigenvectors);
      s.beta = dbh.eigenvalues.conjugate();  // eigenvalues of B itself
      s.cond_U = da.condition;
      s.cond_V = dbh.condition;
      cache_->data = std::move(s);
    } catch (...) {
      cache_->error = std::current_exception();
    }
  });
  if (cache_->error) std::rethrow_exception(cache_->error);
  return cache_->data;
}

namespace {

void check_action_dims(const SpectralData& spec, const Matrix& X, const char* who) {
  require(X.rows() == spec.n() && X.cols() == spec.m(),
          std::string(who) + ": X must be n x m");
}

}  // namespace

Complex inner_product_uv(const SpectralData& spec, const Matrix& X, const Matrix& Y) {
  check_action_dims(spec, X, "inner_product_uv");
  check_action_dims(spec, Y, "inner_product_uv");
  Matrix Xt = spec.U_inv * X * spec.V_inv.adjoint();
  Matrix Yt = spec.U_inv * Y * spec.V_inv.adjoint();
  return frobenius_inner(Xt, Yt);
}

double norm_uv(const SpectralData& spec, const Matrix& X) {
  check_action_dims(spec, X, "norm_uv");
  return (spec.U_inv * X * spec.V_inv.adjoint()).norm();
}

Matrix adjoint_apply(const SylvesterOperator& op, const Matrix& X) {
  const SpectralData& s = op.spectral();
  check_action_dims(s, X, "adjoint_apply");
  Vector alpha_c = s.alpha.conjugate();
  Vector beta_c = s.beta.conjugate();  // D_{B^H} entries
  Matrix left = s.U * (alpha_c.asDiagonal() * (s.U_inv * X));
  Matrix right = ((X * s.V_inv.adjoint()) * beta_c.asDiagonal()) * s.V.adjoint();
  return left + right;
}

Matrix spectral_apply(const SpectralData& spec, const Matrix& mask, const Matrix& X) {
  require(mask.rows() == spec.n() && mask.cols() == spec.m(),
          "spectral_apply: mask must be n x m");
  check_action_dims(spec, X, "spectral_apply");
  Matrix Xt = spec.U_inv * X * spec.V_inv.adjoint();
  return spec.U * mask.cwiseProduct(Xt) * spec.V.adjoint();
}

double operator_norm(const SpectralData& spec) {
  double best = 0.0;
  for (Index i = 0; i < spec.n(); ++i)
    for (Index j = 0; j < spec.m(); ++j)
      best = std::max(best, std::abs(spec.alpha(i) + spec.beta(j)));
  return best;
}

Matrix sum_mask(const SpectralData& spec) {
  Matrix M(spec.n(), spec.m());
  for (Index i = 0; i < spec.n(); ++i)
    for (Index j = 0; j < spec.m(); ++j) M(i, j) = spec.alpha(i) + spec.beta(j);
  return M;
}

Matrix exp_mask(const SpectralData& spec, double t) {
  Matrix M(spec.n(), spec.m());
  for (Index i = 0; i < spec.n(); ++i)
    for (Index j = 0; j < spec.m(); ++j)
      M(i, j) = std::exp(t * (spec.alpha(i) + spec.beta(j)));
  return M;
}

Matrix integral_mask(const SpectralData& spec, double t) {
  Matrix M(spec.n(), spec.m());
  for (Index i = 0; i < spec.n(); ++i) {
    for (Index j = 0; j < spec.m(); ++j) {
      Complex z = spec.alpha(i) + spec.beta(j);
      Complex w = t * z;
      if (std::abs(w) < 1e-8) {
        // 4-term Taylor of (e^w - 1)/w; avoids cancellation near z t = 0.
        M(i, j) = t * (1.0 + w / 2.0 + w * w / 6.0 + w * w * w / 24.0);
      } else {
        M(i, j) = (std::exp(w) - 1.0) / z;
      }
    }
  }
  return M;
}

Matrix inverse_mask(const SpectralData& spec) {
  double tol = 1e-12 * operator_norm(spec);
  Matrix M(spec.n(), spec.m());
  for (Index i = 0; i < spec.n(); ++i) {
    for (Index j = 0; j < spec.m(); ++j) {
      Complex z = spec.alpha(i) + spec.beta(j);
      if (std::abs(z) <= tol) {
        std::ostringstream msg;
        msg << "inverse_mask: eigenvalue sum alpha_" << i << " + beta_" << j
            << " = " << z << " is numerically zero (spectra of A and -B intersect)";
        throw SingularOperatorError(msg.str());
      }
      M(i, j) = 1.0 / z;
    }
  }
  return M;
}

}  // namespace diffsylv
