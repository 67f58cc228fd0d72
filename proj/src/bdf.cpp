#include "diffsylv/bdf.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <utility>

namespace diffsylv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// The per-(order, h) step machinery: shifted operator and coefficients.
struct Shifted {
  SylvesterOperator op;
  BdfCoefficients coeffs;
  double hbeta = 0.0;
};

Shifted make_shifted(const SylvesterOperator& op, int order, double h) {
  BdfCoefficients coeffs = bdf_coefficients(order);
  const double hb = h * coeffs.beta;
  Matrix As = hb * op.A();
  As.diagonal().array() -= 0.5;
  Matrix Bs = hb * op.B();
  Bs.diagonal().array() -= 0.5;
  return Shifted{SylvesterOperator(std::move(As), std::move(Bs)), std::move(coeffs), hb};
}

/// G = h beta C - sum_{j>=1} alpha_j X_{n-j}; the step solves shifted(X) + G = 0.
template <typename History>
Matrix bdf_rhs(const Shifted& sh, const Matrix& C, const History& hist, int order) {
  Matrix G = sh.hbeta * C;
  for (int j = 1; j <= order; ++j) G -= sh.coeffs.alpha(j) * hist[j - 1];
  return G;
}

}  // namespace

BdfCoefficients bdf_coefficients(int order) {
  require(order >= 1 && order <= 6, "bdf_coefficients: order must be in [1, 6]");
  BdfCoefficients c;
  c.alpha.resize(order + 1);
  switch (order) {
    case 1:
      c.alpha << 1.0, -1.0;
      c.beta = 1.0;
      break;
    case 2:
      c.alpha << 1.0, -4.0 / 3.0, 1.0 / 3.0;
      c.beta = 2.0 / 3.0;
      break;
    case 3:
      c.alpha << 1.0, -18.0 / 11.0, 9.0 / 11.0, -2.0 / 11.0;
      c.beta = 6.0 / 11.0;
      break;
    case 4:
      c.alpha << 1.0, -48.0 / 25.0, 36.0 / 25.0, -16.0 / 25.0, 3.0 / 25.0;
      c.beta = 12.0 / 25.0;
      break;
    case 5:
      c.alpha << 1.0, -300.0 / 137.0, 300.0 / 137.0, -200.0 / 137.0, 75.0 / 137.0,
          -12.0 / 137.0;
      c.beta = 60.0 / 137.0;
      break;
    default:
      c.alpha << 1.0, -360.0 / 147.0, 450.0 / 147.0, -400.0 / 147.0, 225.0 / 147.0,
          -72.0 / 147.0, 10.0 / 147.0;
      c.beta = 60.0 / 147.0;
      break;
  }
  return c;
}

Matrix bdf_step(const SylvesterOperator& op, const Matrix& C,
                const std::vector<Matrix>& history, const BdfConfig& cfg) {
  require(cfg.order >= 1 && cfg.order <= 6, "bdf_step: order must be in [1, 6]");
  require(cfg.step_size > 0.0 && std::isfinite(cfg.step_size),
          "bdf_step: step_size must be positive");
  require(C.rows() == op.n() && C.cols() == op.m(), "bdf_step: C must be n x m");
  require_finite(C, "bdf_step C");
  require(history.size() == static_cast<std::size_t>(cfg.order),
          "bdf_step: history must hold exactly `order` snapshots, most recent first");
  for (const Matrix& X : history) {
    require(X.rows() == op.n() && X.cols() == op.m(),
            "bdf_step: history snapshot has wrong shape");
    require_finite(X, "bdf_step history");
  }
  Shifted sh = make_shifted(op, cfg.order, cfg.step_size);
  return solve_algebraic(sh.op, bdf_rhs(sh, C, history, cfg.order));
}

SolveReport bdf_integrate(const DseProblem& p, const BdfConfig& cfg) {
  require(cfg.order >= 1 && cfg.order <= 6, "bdf_integrate: order must be in [1, 6]");
  require(cfg.step_size > 0.0 && std::isfinite(cfg.step_size),
          "bdf_integrate: step_size must be positive");
  const double h = cfg.step_size;
  const int pord = cfg.order;
  constexpr double tiny = std::numeric_limits<double>::min();

  // Every grid point must sit on the step lattice.
  std::vector<long long> kidx(p.t_grid.size());
  for (std::size_t i = 0; i < p.t_grid.size(); ++i) {
    const double t = p.t_grid[i];
    const long long k = std::llround(t / h);
    require(std::abs(static_cast<double>(k) * h - t) <= 1e-9 * std::max(1.0, std::abs(t)),
            "bdf_integrate: t_grid point is not an integer multiple of step_size");
    kidx[i] = k;
  }
  for (std::size_t i = 1; i < kidx.size(); ++i) {
    require(kidx[i] > kidx[i - 1],
            "bdf_integrate: step_size too coarse to separate t_grid points");
  }
  const long long N = kidx.back();

  SolveReport rep;
  rep.t_grid = p.t_grid;
  rep.method = "bdf" + std::to_string(pord);
  rep.dim_or_order = pord;

  Clock::time_point t0 = Clock::now();

  auto maybe_herm = [&](Matrix X) {
    if (p.lyapunov) X = 0.5 * (X + X.adjoint());
    return X;
  };

  std::size_t gi = 0;
  auto record = [&](long long s, const Matrix& X, double rfro, double r2) {
    while (gi < kidx.size() && kidx[gi] == s) {
      rep.snapshots.push_back(X);
      rep.residual_norms.push_back(rfro);
      rep.residual_norms_2.push_back(r2);
      ++gi;
    }
  };

  Matrix X0 = maybe_herm(p.D);
  record(0, X0, 0.0, 0.0);

  std::array<std::optional<Shifted>, 7> cache;
  auto shifted_for = [&](int q) -> Shifted& {
    if (!cache[q]) cache[q] = make_shifted(p.op, q, h);
    return *cache[q];
  };

  std::deque<Matrix> hist{std::move(X0)};
  long long s_begin = 1;

  if (cfg.startup == BdfStartup::Exact && pord >= 2 && N >= 1) {
    const long long warm_to = std::min<long long>(pord - 1, N);
    std::vector<double> wgrid;
    for (long long s = 0; s <= warm_to; ++s) wgrid.push_back(static_cast<double>(s) * h);
    DseProblem wp(p.op, p.C, p.D, std::move(wgrid), p.lyapunov);
    SolveReport warm = solve_spectral(wp);
    for (long long s = 1; s <= warm_to; ++s) {
      Matrix X = maybe_herm(warm.snapshots[static_cast<std::size_t>(s)]);
      rep.step_residuals.push_back(0.0);
      record(s, X, 0.0, 0.0);
      hist.push_front(std::move(X));
      while (hist.size() > static_cast<std::size_t>(pord)) hist.pop_back();
    }
    s_begin = warm_to + 1;
  }

  for (long long s = s_begin; s <= N; ++s) {
    const int q = (cfg.startup == BdfStartup::Ramp)
                      ? static_cast<int>(std::min<long long>(pord, s))
                      : pord;
    Shifted& sh = shifted_for(q);
    Matrix G = bdf_rhs(sh, p.C, hist, q);
    Matrix X = maybe_herm(solve_algebraic(sh.op, G));
    Matrix R = sh.op.apply(X) + G;
    const double rfro = R.norm() / (G.norm() + tiny);
    rep.step_residuals.push_back(rfro);
    const bool snap = (gi < kidx.size() && kidx[gi] == s);
    const double r2 = snap ? norm2(R) / (norm2(G) + tiny) : 0.0;
    record(s, X, rfro, r2);
    hist.push_front(std::move(X));
    while (hist.size() > static_cast<std::size_t>(pord)) hist.pop_back();
  }

  for (int q = 6; q >= 1; --q) {
    if (cache[q]) {
      const SpectralData& sd = cache[q]->op.spectral();
      rep.cond_uv = sd.cond_U * sd.cond_V;
      break;
    }
  }

  rep.wall_time_s = seconds_since(t0);
  return rep;
}

}  // namespace diffsylv
