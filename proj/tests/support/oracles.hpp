#pragma once

#include "diffsylv/dense_solvers.hpp"
#include "diffsylv/krylov.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

/// Independent numerical oracles and deterministic problem builders for the
/// test suite. Nothing in this header reuses library code paths it is meant
/// to check: the RNG is local (std::normal_distribution is implementation-
/// defined, so gaussians are hand-rolled for cross-toolchain determinism),
/// the reference integrator is classic RK4, the BDF weights come from a
/// Vandermonde solve, and the Krylov residual oracle densifies everything.
namespace testsupport {

using diffsylv::Complex;
using diffsylv::Index;
using diffsylv::Matrix;
using diffsylv::RealVector;
using diffsylv::Vector;

class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(6.283185307179586476 * u2);
  }

  Complex cgaussian() {
    double re = gaussian();
    double im = gaussian();
    return Complex(re, im) / std::sqrt(2.0);
  }

 private:
  std::mt19937_64 gen_;
};

inline Matrix random_matrix(TestRng& rng, Index rows, Index cols) {
  Matrix M(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) M(i, j) = rng.cgaussian();
  return M;
}

/// Random dense matrix with spectrum in {Re z <= -0.2 * scale}, spectral
/// norm <= 2.2 * scale; almost surely diagonalizable with moderate cond(U).
inline Matrix stable_dense(TestRng& rng, Index n, double scale = 1.0) {
  Matrix G = random_matrix(rng, n, n);
  double s = Eigen::JacobiSVD<Matrix>(G).singularValues()(0);
  Matrix A = (scale / s) * G;
  A.diagonal().array() -= 1.2 * scale;
  return A;
}

/// Hermitian negative definite with eigenvalues in [-2.2, -0.2] * scale.
inline Matrix hermitian_stable(TestRng& rng, Index n, double scale = 1.0) {
  Matrix G = random_matrix(rng, n, n);
  Matrix H = 0.5 * (G + G.adjoint());
  double s = Eigen::SelfAdjointEigenSolver<Matrix>(H).eigenvalues().cwiseAbs().maxCoeff();
  Matrix A = (scale / s) * H;
  A.diagonal().array() -= 1.2 * scale;
  return 0.5 * (A + A.adjoint());
}

/// Uniform snapshot grid {0, T/k, ..., T}.
inline std::vector<double> grid(double t_final, int k) {
  std::vector<double> g(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i <= k; ++i)
    g[static_cast<std::size_t>(i)] = i == k ? t_final : t_final * i / k;
  return g;
}

/// Classic fixed-step RK4 for X' = rhs(X), from X0 over [0, t_final].
inline Matrix rk4_reference(const std::function<Matrix(const Matrix&)>& rhs,
                            const Matrix& X0, double t_final, int steps) {
  Matrix X = X0;
  double h = t_final / steps;
  for (int i = 0; i < steps; ++i) {
    Matrix k1 = rhs(X);
    Matrix k2 = rhs(X + 0.5 * h * k1);
    Matrix k3 = rhs(X + 0.5 * h * k2);
    Matrix k4 = rhs(X + h * k3);
    X += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return X;
}

/// RK4 reference for the inhomogeneous Sylvester ODE X' = AX + XB + C.
inline Matrix rk4_sylvester(const Matrix& A, const Matrix& B, const Matrix& C,
                            const Matrix& D, double t_final, int steps) {
  return rk4_reference([&](const Matrix& X) { return A * X + X * B + C; }, D,
                       t_final, steps);
}

/// BDF weights from first principles: exactness on monomials t^q, q = 0..p,
/// at t_n = 0 with h = 1 gives sum_j alpha_j (-j)^q = beta [q == 1], plus the
/// normalization alpha_0 = 1. Solved as one dense linear system, sharing no
/// code (and no closed-form table) with the library.
struct BdfWeights {
  RealVector alpha;
  double beta = 0.0;
};

inline BdfWeights bdf_weights_oracle(int p) {
  int dim = p + 2;  // alpha_0..alpha_p and beta
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  for (int q = 0; q <= p; ++q) {
    for (int j = 0; j <= p; ++j) M(q, j) = std::pow(static_cast<double>(-j), q);
    M(q, p + 1) = q == 1 ? -1.0 : 0.0;
  }
  M(p + 1, 0) = 1.0;
  rhs(p + 1) = 1.0;
  Eigen::VectorXd sol = M.fullPivLu().solve(rhs);
  BdfWeights w;
  w.alpha = sol.head(p + 1);
  w.beta = sol(p + 1);
  return w;
}

/// Dense brute-force residual of the lifted projected solution: densifies
/// X~ = Q_A Y Q_B^H and evaluates R = A X~ + X~ B + C - Q_A Y' Q_B^H with
/// Y' from the projected coefficients, entirely in dense arithmetic.
inline Matrix krylov_residual_dense(const Matrix& A, const Matrix& B,
                                    const diffsylv::KrylovBasis& basisA,
                                    const diffsylv::KrylovBasis& basisB,
                                    const Matrix& Y, const Matrix& C) {
  const Matrix& QA = basisA.Q;
  const Matrix& QB = basisB.Q;
  Matrix At = basisA.H_proj;             // Q_A^H A Q_A
  Matrix Bt = basisB.H_proj.adjoint();   // (Q_B^H B^H Q_B)^H = Q_B^H B Q_B
  Matrix Ct = QA.adjoint() * C * QB;
  Matrix Xt = QA * Y * QB.adjoint();
  Matrix Ydot = At * Y + Y * Bt + Ct;
  return A * Xt + Xt * B + C - QA * Ydot * QB.adjoint();
}

}  // namespace testsupport
