#pragma once

#include "diffsylv/dense_solvers.hpp"
#include "diffsylv/factored.hpp"
#include "diffsylv/sparse.hpp"

#include <cstdint>
#include <string>
#include <vector>

/// Deterministic benchmark-problem generators. Everything random is drawn
/// from a seeded generator in a fixed order (A diagonal, B diagonal, D
/// factors, C factors), so a spec reproduces bit-identical matrices run to
/// run and across platforms with IEEE doubles.
namespace diffsylv {

struct ProblemSpec {
  /// laplacian_1d | laplacian_2d | diagonal | matrix_market
  std::string generator = "laplacian_1d";
  Index n = 10;
  Index m = 0;         ///< 0 means "same as n"
  Index rhs_rank = 1;  ///< rank of C = C1 C2^H
  Index init_rank = 1; ///< rank of D = D1 D2^H
  double stability_shift = 0.0;  ///< added to the generated diagonal
  bool lyapunov_mode = true;     ///< forces B = A^H, C2 = C1, D2 = D1
  double t_final = 0.1;
  int num_snapshots = 5;  ///< grid = {0, T/k, ..., T}, k = num_snapshots
  std::uint64_t seed = 1;
  std::string path_a;  ///< matrix_market generator: file for A
  std::string path_b;  ///< matrix_market generator: file for B (non-Lyapunov)

  Index resolved_m() const { return m == 0 ? n : m; }

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;

  /// num_snapshots + 1 points from 0 to exactly t_final.
  std::vector<double> time_grid() const;

  /// Short human-readable identity string used in benchmark records.
  std::string digest() const;
};

struct GeneratedProblem {
  SparseMatrix A;
  SparseMatrix B;
  FactoredMatrix C;
  FactoredMatrix D;
  bool lyapunov = false;
  std::vector<double> t_grid;

  /// Densifies into the closed-form solvers' problem type.
  DseProblem dense_problem() const;
};

/// Deterministic given spec.seed. laplacian_1d is (n+1)^2 tridiag(1, -2, 1)
/// plus stability_shift on the diagonal; laplacian_2d is the 5-point stencil
/// on a sqrt(n) x sqrt(n) grid; diagonal draws a_ii = shift - (0.1 + 0.9 u);
/// matrix_market reads A (and B unless Lyapunov) from the given files. Factor
/// columns are standard complex normal draws, normalized to unit 2-norm.
GeneratedProblem generate_problem(const ProblemSpec& spec);

}  // namespace diffsylv
