#include "diffsylv/taylor.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

namespace diffsylv {

Matrix taylor_direct(const DseProblem& p, TaylorOrder ord, double t) {
  require(ord.m1 >= 0 && ord.m2 >= 0, "taylor_direct: orders must be nonnegative");
  // The chains carry the scaled terms t^k/k! S^k(D) and t^{k-1}/(k-1)! S^{k-1}(C)
  // so intermediates stay at the size of the series terms; raw powers S^k would
  // overflow long before the (bounded) partial sums do.
  Matrix X = p.D;
  Matrix powD = p.D;
  Matrix powC = p.C;
  int kmax = std::max(ord.m1, ord.m2);
  for (int k = 1; k <= kmax; ++k) {
    double step = t / k;
    if (k <= ord.m1) {
      powD = step * p.op.apply(powD);
      X += powD;
    }
    if (k <= ord.m2) {
      X += step * powC;
      if (k < ord.m2) powC = step * p.op.apply(powC);
    }
  }
  if (p.lyapunov) X = 0.5 * (X + X.adjoint());
  return X;
}

namespace {

// Scaled power blocks t^p/p! M^p F for p = 0..pmax; folding the coefficient
// into each step keeps the blocks at the size of the series terms instead of
// letting them grow like ‖M‖^p.
std::vector<Matrix> scaled_power_blocks(const Matrix& M, const Matrix& F, double t,
                                        int pmax) {
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(pmax) + 1);
  blocks.push_back(F);
  for (int p = 1; p <= pmax; ++p) blocks.push_back((t / p) * (M * blocks.back()));
  return blocks;
}

}  // namespace

Matrix taylor_factored(const FactoredMatrix& D, const FactoredMatrix& C,
                       const Matrix& A, const Matrix& B, TaylorOrder ord, double t) {
  require(A.rows() == A.cols() && B.rows() == B.cols(),
          "taylor_factored: A, B must be square");
  require(ord.m1 >= 0 && ord.m2 >= 0, "taylor_factored: orders must be nonnegative");
  const Index n = A.rows();
  const Index m = B.rows();
  require(D.is_zero() || (D.rows() == n && D.cols() == m),
          "taylor_factored: D factors not conformal");
  require(C.is_zero() || (C.rows() == n && C.cols() == m),
          "taylor_factored: C factors not conformal");

  Matrix BH = B.adjoint();
  Matrix X = Matrix::Zero(n, m);

  if (!D.is_zero()) {
    // sum over p+q <= m1 of (tau_p A^p D1)(tau_q (B^H)^q D2)^H with
    // tau_i = t^i/i! folded into the blocks (tau is real, so it commutes with
    // the adjoint); the inner sum over q only needs prefix sums of the right
    // blocks.
    std::vector<Matrix> L = scaled_power_blocks(A, D.F1(), t, ord.m1);
    std::vector<Matrix> R = scaled_power_blocks(BH, D.F2(), t, ord.m1);
    std::vector<Matrix> prefix(R.size());
    prefix[0] = R[0];
    for (std::size_t q = 1; q < R.size(); ++q) prefix[q] = prefix[q - 1] + R[q];
    for (int p = 0; p <= ord.m1; ++p) {
      const Matrix& right = prefix[static_cast<std::size_t>(ord.m1 - p)];
      X += L[static_cast<std::size_t>(p)] * right.adjoint();
    }
  }

  if (!C.is_zero() && ord.m2 >= 1) {
    // C-part coefficient t^{p+q+1}/(p+q+1)! binom(p+q, q) = t tau_p tau_q/(p+q+1);
    // the leftover 1/(p+q+1) factor couples p and q, so this one is a plain
    // double loop over the scaled blocks.
    int top = ord.m2 - 1;
    std::vector<Matrix> L = scaled_power_blocks(A, C.F1(), t, top);
    std::vector<Matrix> R = scaled_power_blocks(BH, C.F2(), t, top);
    for (int p = 0; p <= top; ++p) {
      for (int q = 0; p + q <= top; ++q) {
        double c = t / (p + q + 1);
        X += c * (L[static_cast<std::size_t>(p)] * R[static_cast<std::size_t>(q)].adjoint());
      }
    }
  }
  return X;
}

namespace {

// sum_{k > m} x^k / k! for x >= 0, summed until terms fall below 1e-18 of the
// running tail (never stopping inside the growing regime k <= x).
double exp_tail(double x, int m) {
  if (x == 0.0) return 0.0;
  double term = 1.0;
  for (int k = 1; k <= m + 1; ++k) term *= x / k;
  if (!std::isfinite(term)) return std::numeric_limits<double>::infinity();
  double sum = term;
  double k = m + 2.0;
  while (k <= x || term > 1e-18 * sum) {
    term *= x / k;
    sum += term;
    k += 1.0;
    if (!std::isfinite(sum)) return std::numeric_limits<double>::infinity();
  }
  return sum;
}

double d_tail(double x, double normD, int m1) {
  return normD == 0.0 ? 0.0 : normD * exp_tail(x, m1);
}

double c_tail(double x, double op_norm, double t, double normC, int m2) {
  if (normC == 0.0) return 0.0;
  // sum_{k>m2} |t|^k op_norm^{k-1}/k! ; for op_norm = 0 only the k = 1 term
  // exists (|t| normC), already gone once m2 >= 1.
  if (op_norm == 0.0) return m2 >= 1 ? 0.0 : std::abs(t) * normC;
  return (normC / op_norm) * exp_tail(x, m2);
}

}  // namespace

double tail_bound(double op_norm, double normD, double normC, TaylorOrder ord, double t) {
  require(op_norm >= 0.0 && normD >= 0.0 && normC >= 0.0,
          "tail_bound: norms must be nonnegative");
  require(ord.m1 >= 0 && ord.m2 >= 0, "tail_bound: orders must be nonnegative");
  double x = std::abs(t) * op_norm;
  return d_tail(x, normD, ord.m1) + c_tail(x, op_norm, t, normC, ord.m2);
}

TaylorOrder order_for_tolerance(double op_norm, double normD, double normC,
                                double t, double tol) {
  require(tol > 0.0, "order_for_tolerance: tol must be positive");
  constexpr int kCap = 500;
  double x = std::abs(t) * op_norm;
  TaylorOrder ord;
  double dt = d_tail(x, normD, ord.m1);
  double ct = c_tail(x, op_norm, t, normC, ord.m2);
  while (dt + ct > tol) {
    if (dt >= ct) {
      if (++ord.m1 > kCap)
        throw SeriesTooLongError("order_for_tolerance: D-series order cap exceeded");
      dt = d_tail(x, normD, ord.m1);
    } else {
      if (++ord.m2 > kCap)
        throw SeriesTooLongError("order_for_tolerance: C-series order cap exceeded");
      ct = c_tail(x, op_norm, t, normC, ord.m2);
    }
  }
  return ord;
}

SolveReport solve_taylor(const DseProblem& p, double tol) {
  auto entry = std::chrono::steady_clock::now();
  const SpectralData& s = p.op.spectral();
  double opn = operator_norm(s);
  double t_max = p.t_grid.back();
  TaylorOrder ord =
      order_for_tolerance(opn, norm_uv(s, p.D), norm_uv(s, p.C), t_max, tol);
  auto eval = [&](double t) { return taylor_direct(p, ord, t); };
  double setup =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - entry).count();
  return report_from_evaluator(p, "taylor", eval, s.cond_U * s.cond_V,
                               std::max(ord.m1, ord.m2), setup);
}

}  // namespace diffsylv
