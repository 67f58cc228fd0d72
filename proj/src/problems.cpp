#include "diffsylv/problems.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace diffsylv {

namespace {

/// Seeded source with a pinned normal transform: std::normal_distribution is
/// implementation-defined, so reproducibility needs a hand-rolled Box-Muller
/// on top of the portable mt19937_64 stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // [0, 1), 53-bit
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    const double pi = std::acos(-1.0);
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * pi * u2);
  }

  Complex complex_normal() {  // CN(0, 1)
    double re = normal();
    double im = normal();
    return Complex(re, im) / std::sqrt(2.0);
  }

 private:
  std::mt19937_64 gen_;
};

/// rows x rank factor, filled column by column, each column normalized.
Matrix draw_factor(Rng& rng, Index rows, Index rank) {
  Matrix F(rows, rank);
  for (Index j = 0; j < rank; ++j) {
    for (Index i = 0; i < rows; ++i) F(i, j) = rng.complex_normal();
    double nrm = F.col(j).norm();
    if (nrm > 0.0) F.col(j) /= nrm;
  }
  return F;
}

SparseMatrix laplacian_1d(Index n, double shift) {
  const double s = static_cast<double>((n + 1) * (n + 1));
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(3 * n));
  for (Index i = 0; i < n; ++i) {
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i),
                       Complex(-2.0 * s + shift, 0.0));
    if (i > 0) trips.emplace_back(static_cast<int>(i), static_cast<int>(i - 1), Complex(s, 0.0));
    if (i + 1 < n) trips.emplace_back(static_cast<int>(i), static_cast<int>(i + 1), Complex(s, 0.0));
  }
  return SparseMatrix(n, n, trips);
}

SparseMatrix laplacian_2d(Index n, double shift) {
  const Index g = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
  const double s = static_cast<double>((g + 1) * (g + 1));
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(5 * n));
  for (Index j = 0; j < g; ++j) {
    for (Index i = 0; i < g; ++i) {
      const int p = static_cast<int>(j * g + i);
      trips.emplace_back(p, p, Complex(-4.0 * s + shift, 0.0));
      if (i > 0) trips.emplace_back(p, p - 1, Complex(s, 0.0));
      if (i + 1 < g) trips.emplace_back(p, p + 1, Complex(s, 0.0));
      if (j > 0) trips.emplace_back(p, p - static_cast<int>(g), Complex(s, 0.0));
      if (j + 1 < g) trips.emplace_back(p, p + static_cast<int>(g), Complex(s, 0.0));
    }
  }
  return SparseMatrix(n, n, trips);
}

SparseMatrix diagonal_matrix(Rng& rng, Index n, double shift) {
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double a = shift - (0.1 + 0.9 * rng.uniform());
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i), Complex(a, 0.0));
  }
  return SparseMatrix(n, n, trips);
}

bool is_perfect_square(Index n) {
  const Index g = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
  return g * g == n;
}

}  // namespace

void ProblemSpec::validate() const {
  const bool mm = generator == "matrix_market";
  require(generator == "laplacian_1d" || generator == "laplacian_2d" ||
              generator == "diagonal" || mm,
          "ProblemSpec: unknown generator '" + generator + "'");
  if (mm) {
    require(!path_a.empty(), "ProblemSpec: matrix_market generator needs path_a");
    require(lyapunov_mode || !path_b.empty(),
            "ProblemSpec: matrix_market generator needs path_b unless Lyapunov");
  } else {
    require(n >= 1, "ProblemSpec: n must be >= 1");
    require(resolved_m() >= 1, "ProblemSpec: m must be >= 1");
    require(!lyapunov_mode || resolved_m() == n,
            "ProblemSpec: Lyapunov mode needs m = n");
    if (generator == "laplacian_2d") {
      require(is_perfect_square(n), "ProblemSpec: laplacian_2d needs square n");
      require(lyapunov_mode || is_perfect_square(resolved_m()),
              "ProblemSpec: laplacian_2d needs square m");
    }
  }
  require(rhs_rank >= 0, "ProblemSpec: rhs_rank must be >= 0");
  require(init_rank >= 0, "ProblemSpec: init_rank must be >= 0");
  require(std::isfinite(stability_shift), "ProblemSpec: stability_shift must be finite");
  require(std::isfinite(t_final) && t_final > 0.0, "ProblemSpec: t_final must be positive");
  require(num_snapshots >= 1, "ProblemSpec: num_snapshots must be >= 1");
}

std::vector<double> ProblemSpec::time_grid() const {
  std::vector<double> grid(static_cast<std::size_t>(num_snapshots) + 1);
  for (int i = 0; i <= num_snapshots; ++i) {
    grid[static_cast<std::size_t>(i)] =
        (i == num_snapshots) ? t_final : t_final * i / num_snapshots;
  }
  return grid;
}

std::string ProblemSpec::digest() const {
  std::ostringstream os;
  os << generator;
  if (generator == "matrix_market") {
    os << ":" << path_a;
    if (!lyapunov_mode) os << ":" << path_b;
  } else {
    os << ":n=" << n << ":m=" << resolved_m() << ":shift=" << stability_shift;
  }
  os << ":rhs=" << rhs_rank << ":init=" << init_rank
     << ":lyap=" << (lyapunov_mode ? 1 : 0) << ":T=" << t_final
     << ":snaps=" << num_snapshots << ":seed=" << seed;
  return os.str();
}

DseProblem GeneratedProblem::dense_problem() const {
  return DseProblem(SylvesterOperator(A.dense(), B.dense()), C.dense(), D.dense(),
                    t_grid, lyapunov);
}

GeneratedProblem generate_problem(const ProblemSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  GeneratedProblem out;
  out.lyapunov = spec.lyapunov_mode;
  out.t_grid = spec.time_grid();

  if (spec.generator == "matrix_market") {
    out.A = SparseMatrix::from_matrix_market(spec.path_a);
    require(out.A.rows() == out.A.cols(), "generate_problem: A file must be square");
    out.B = spec.lyapunov_mode ? out.A.adjoint()
                               : SparseMatrix::from_matrix_market(spec.path_b);
    require(out.B.rows() == out.B.cols(), "generate_problem: B file must be square");
    require(!spec.lyapunov_mode || out.B.rows() == out.A.rows(),
            "generate_problem: Lyapunov mode needs m = n");
  } else if (spec.generator == "laplacian_1d") {
    out.A = laplacian_1d(spec.n, spec.stability_shift);
    out.B = spec.lyapunov_mode ? out.A.adjoint()
                               : laplacian_1d(spec.resolved_m(), spec.stability_shift);
  } else if (spec.generator == "laplacian_2d") {
    out.A = laplacian_2d(spec.n, spec.stability_shift);
    out.B = spec.lyapunov_mode ? out.A.adjoint()
                               : laplacian_2d(spec.resolved_m(), spec.stability_shift);
  } else {  // diagonal
    out.A = diagonal_matrix(rng, spec.n, spec.stability_shift);
    out.B = spec.lyapunov_mode ? out.A.adjoint()
                               : diagonal_matrix(rng, spec.resolved_m(), spec.stability_shift);
  }

  const Index n = out.A.rows();
  const Index m = out.B.rows();
  Matrix D1 = draw_factor(rng, n, spec.init_rank);
  Matrix D2 = spec.lyapunov_mode ? D1 : draw_factor(rng, m, spec.init_rank);
  Matrix C1 = draw_factor(rng, n, spec.rhs_rank);
  Matrix C2 = spec.lyapunov_mode ? C1 : draw_factor(rng, m, spec.rhs_rank);
  out.D = FactoredMatrix(std::move(D1), std::move(D2));
  out.C = FactoredMatrix(std::move(C1), std::move(C2));
  return out;
}

}  // namespace diffsylv
