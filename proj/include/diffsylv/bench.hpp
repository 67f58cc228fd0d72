#pragma once

#include "diffsylv/bdf.hpp"
#include "diffsylv/problems.hpp"

#include <string>
#include <vector>

/// Cross-method comparison harness: runs requested solvers on a generated
/// problem, measures per-snapshot errors against a spectral (or externally
/// supplied) reference, and reads/writes the result tables.
namespace diffsylv {

/// Per-method tolerances and harness limits.
struct BenchConfig {
  double taylor_tol = 1e-12;  ///< passed to order_for_tolerance
  double krylov_tol = 1e-8;   ///< relative residual target of the projection solver
  int krylov_max_order = 80;
  double bdf_step = 1e-3;
  BdfStartup bdf_startup = BdfStartup::Ramp;
  long long dense_cap = 250000;  ///< max n*m for the dense spectral reference
  std::string reference_dir;     ///< dir of snapshot_%04d.bin files; overrides the cap
};

/// One method's comparison row set: per-snapshot relative errors against the
/// reference plus the solver's own diagnostics. Errors and residuals are
/// nonnegative by construction.
struct BenchmarkRecord {
  std::string method;
  std::string problem;  ///< ProblemSpec digest
  std::vector<double> t_grid;
  std::vector<double> rel_errors;    ///< Frobenius, per snapshot
  std::vector<double> rel_errors_2;  ///< spectral norm (JSON output only)
  std::vector<double> residuals;     ///< the solver's residual_norms
  double wall_time_s = 0.0;
  int dim_or_order = 0;
  bool converged = true;
};

/// Method labels accepted by run_method / the CLI.
const std::vector<std::string>& known_methods();

/// Dispatches one solver run on an already generated problem. Dense methods
/// (spectral, voc_split, expm_direct, taylor, bdf1..bdf6) densify the
/// operator; krylov works on the sparse data directly.
SolveReport run_method(const GeneratedProblem& gen, const std::string& method,
                       const BenchConfig& cfg);

/// Generates the problem, computes the reference (solve_spectral when
/// n*m <= cfg.dense_cap, otherwise snapshots read from cfg.reference_dir),
/// runs every requested method, and returns one record per method in input
/// order. Wall times come from the solvers' own timers, so problem generation
/// and I/O are excluded. Throws ReferenceInfeasibleError when the problem
/// exceeds the dense cap and no reference directory is set.
std::vector<BenchmarkRecord> run_comparison(const ProblemSpec& spec,
                                            const std::vector<std::string>& methods,
                                            const BenchConfig& cfg);

/// results.csv with the fixed header
/// method,snapshot_index,t,rel_error_fro,residual,wall_time_s,dim_or_order
/// and %.17g numbers so a read-back reproduces the doubles exactly.
void write_csv(const std::string& path, const std::vector<BenchmarkRecord>& records);

/// Inverse of write_csv for the fields the CSV carries (method, t_grid,
/// rel_errors, residuals, wall_time_s, dim_or_order).
std::vector<BenchmarkRecord> read_csv(const std::string& path);

/// Full-fidelity JSON: problem digest plus every record field, including the
/// spectral-norm error column that the CSV omits.
void write_json(const std::string& path, const ProblemSpec& spec,
                const std::vector<BenchmarkRecord>& records);

}  // namespace diffsylv
