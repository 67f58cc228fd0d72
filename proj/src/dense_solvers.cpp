#include "diffsylv/dense_solvers.hpp"

#include "diffsylv/linalg.hpp"

#include <array>
#include <chrono>
#include <cmath>

namespace diffsylv {

DseProblem::DseProblem(SylvesterOperator op_, Matrix C_, Matrix D_,
                       std::vector<double> grid, bool lyapunov_)
    : op(std::move(op_)), C(std::move(C_)), D(std::move(D_)),
      t_grid(std::move(grid)), lyapunov(lyapunov_) {
  require(C.rows() == op.n() && C.cols() == op.m(), "DseProblem: C must be n x m");
  require(D.rows() == op.n() && D.cols() == op.m(), "DseProblem: D must be n x m");
  require_finite(C, "DseProblem C");
  require_finite(D, "DseProblem D");
  require(!t_grid.empty(), "DseProblem: t_grid must be nonempty");
  require(t_grid.front() == 0.0, "DseProblem: t_grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    require(t_grid[i] > t_grid[i - 1], "DseProblem: t_grid must be strictly increasing");
  if (lyapunov) {
    require(op.n() == op.m(), "DseProblem: Lyapunov mode needs square shape");
  }
}

Matrix SolveReport::snapshot_dense(std::size_t i) const {
  if (!snapshots.empty()) return snapshots.at(i);
  return factored_snapshots.at(i).dense();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Matrix hermitize(const Matrix& X) { return 0.5 * (X + X.adjoint()); }

// Relative-residual denominator: problem scale rather than ||X'|| so steady
// states do not blow the ratio up.
double residual_scale(const DseProblem& p, const Matrix& X) {
  return p.C.norm() + (p.op.A().norm() + p.op.B().norm()) * X.norm() +
         std::numeric_limits<double>::min();
}

// Step for the central-difference diagnostic: (h ||S||)^2 truncation and
// eps/(h ||S||) roundoff balanced near 1e-8 on stiff problems, plain 1e-5 at
// desk scale. The 1-norm of A, B stands in for ||S|| so no spectral data is
// needed here.
double fd_step(const DseProblem& p) {
  double scale = norm1(p.op.A()) + norm1(p.op.B());
  return std::min(1e-5, 3e-4 / std::max(1.0, scale));
}

}  // namespace

SolveReport report_from_evaluator(const DseProblem& p, const std::string& method,
                                  const std::function<Matrix(double)>& eval,
                                  double cond_uv, int dim_or_order,
                                  double setup_seconds) {
  SolveReport rep;
  rep.t_grid = p.t_grid;
  rep.method = method;
  rep.cond_uv = cond_uv;
  rep.dim_or_order = dim_or_order;

  auto evaluate = [&](double t) {
    Matrix X = eval(t);
    return p.lyapunov ? hermitize(X) : X;
  };

  Clock::time_point t0 = Clock::now();
  rep.snapshots.reserve(p.t_grid.size());
  for (double t : p.t_grid) rep.snapshots.push_back(evaluate(t));
  rep.wall_time_s = setup_seconds + seconds_since(t0);

  // Diagnostics are not part of the timed solve.
  double h = fd_step(p);
  rep.residual_norms.reserve(p.t_grid.size());
  rep.residual_norms_2.reserve(p.t_grid.size());
  for (std::size_t i = 0; i < p.t_grid.size(); ++i) {
    double t = p.t_grid[i];
    Matrix dX = (evaluate(t + h) - evaluate(t - h)) / (2.0 * h);
    Matrix R = dX - (p.op.apply(rep.snapshots[i]) + p.C);
    double den = residual_scale(p, rep.snapshots[i]);
    rep.residual_norms.push_back(R.norm() / den);
    rep.residual_norms_2.push_back(norm2(R) / den);
  }
  return rep;
}

SolveReport solve_spectral(const DseProblem& p) {
  Clock::time_point entry = Clock::now();
  const SpectralData& s = p.op.spectral();
  Matrix Dt = s.U_inv * p.D * s.V_inv.adjoint();
  Matrix Ct = s.U_inv * p.C * s.V_inv.adjoint();
  auto eval = [&](double t) {
    Matrix coeff = exp_mask(s, t).cwiseProduct(Dt) + integral_mask(s, t).cwiseProduct(Ct);
    return Matrix(s.U * coeff * s.V.adjoint());
  };
  return report_from_evaluator(p, "spectral", eval, s.cond_U * s.cond_V, 0,
                               seconds_since(entry));
}

SolveReport solve_voc_split(const DseProblem& p) {
  Clock::time_point entry = Clock::now();
  const SpectralData& s = p.op.spectral();
  Matrix inv = inverse_mask(s);  // throws SingularOperatorError without a gap
  Matrix P = spectral_apply(s, inv, Matrix(-p.C));  // steady state S^{-1}(-C)
  auto eval = [&](double t) {
    Matrix E = exp_mask(s, t);
    return Matrix(spectral_apply(s, E, p.D) + P - spectral_apply(s, E, P));
  };
  return report_from_evaluator(p, "voc_split", eval, s.cond_U * s.cond_V, 0,
                               seconds_since(entry));
}

namespace {

// 32-node Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on the
// Legendre recurrence, computed once.
struct GaussLegendre32 {
  std::array<double, 32> x{};
  std::array<double, 32> w{};
  GaussLegendre32() {
    constexpr int n = 32;
    const double pi = std::acos(-1.0);
    for (int i = 0; i < n / 2; ++i) {
      double xi = std::cos(pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = xi;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        double step = p1 / dp;
        xi -= step;
        if (std::abs(step) < 1e-15) break;
      }
      double wi = 2.0 / ((1.0 - xi * xi) * dp * dp);
      x[static_cast<std::size_t>(i)] = -xi;
      x[static_cast<std::size_t>(n - 1 - i)] = xi;
      w[static_cast<std::size_t>(i)] = wi;
      w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
  }
};

const GaussLegendre32& gl32() {
  static const GaussLegendre32 rule;
  return rule;
}

// integral over [a, b] of e^{uA} C e^{uB} du by one 32-node panel.
Matrix gl_panel(const Matrix& A, const Matrix& B, const Matrix& C, double a, double b) {
  const GaussLegendre32& rule = gl32();
  double mid = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  Matrix acc = Matrix::Zero(C.rows(), C.cols());
  for (std::size_t q = 0; q < rule.x.size(); ++q) {
    double u = mid + half * rule.x[q];
    acc += rule.w[q] * (expm(u * A) * C * expm(u * B));
  }
  return Matrix(half * acc);
}

}  // namespace

SolveReport solve_expm_direct(const DseProblem& p) {
  Clock::time_point entry = Clock::now();
  const Matrix& A = p.op.A();
  const Matrix& B = p.op.B();

  bool have_steady = true;
  double cond_uv = 0.0;
  Matrix P;
  try {
    P = solve_algebraic(p.op, p.C);
    const SpectralData& s = p.op.spectral();
    cond_uv = s.cond_U * s.cond_V;
  } catch (const SingularOperatorError&) {
    have_steady = false;
  } catch (const NotDiagonalizableError&) {
    have_steady = false;  // quadrature path keeps this solver precondition-free
  }

  std::function<Matrix(double)> eval;
  if (have_steady) {
    eval = [&, P](double t) {
      Matrix Ea = expm(t * A);
      Matrix Eb = expm(t * B);
      return Matrix(Ea * p.D * Eb + P - Ea * P * Eb);
    };
  } else {
    // X(t) = e^{tA} D e^{tB} + ∫_0^t e^{uA} C e^{uB} du, the integral done by
    // composite Gauss-Legendre whose panel edges follow the snapshot grid
    // (arbitrary t lands on a trailing partial panel).
    std::vector<double> edges = p.t_grid;
    eval = [&, edges](double t) {
      Matrix X = expm(t * A) * p.D * expm(t * B);
      if (p.C.norm() == 0.0 || t == 0.0) return X;
      Matrix I = Matrix::Zero(p.op.n(), p.op.m());
      double covered = 0.0;
      for (std::size_t k = 1; k < edges.size() && edges[k] <= t; ++k) {
        I += gl_panel(A, B, p.C, edges[k - 1], edges[k]);
        covered = edges[k];
      }
      if (t > covered) I += gl_panel(A, B, p.C, covered, t);
      if (t < 0.0) I = -gl_panel(A, B, p.C, t, 0.0);
      return Matrix(X + I);
    };
  }
  return report_from_evaluator(p, "expm_direct", eval, cond_uv, 0,
                               seconds_since(entry));
}

Matrix solve_algebraic(const SylvesterOperator& op, const Matrix& C) {
  require(C.rows() == op.n() && C.cols() == op.m(), "solve_algebraic: C must be n x m");
  const SpectralData& s = op.spectral();
  Matrix inv = inverse_mask(s);
  return spectral_apply(s, inv, Matrix(-C));
}

}  // namespace diffsylv
