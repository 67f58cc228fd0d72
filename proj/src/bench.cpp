#include "diffsylv/bench.hpp"

#include "diffsylv/krylov.hpp"
#include "diffsylv/matrix_io.hpp"
#include "diffsylv/taylor.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace diffsylv {

namespace {

constexpr const char* kCsvHeader =
    "method,snapshot_index,t,rel_error_fro,residual,wall_time_s,dim_or_order";

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double rel_error_two(const Matrix& got, const Matrix& want) {
  double den = norm2(want);
  double num = norm2(Matrix(got - want));
  if (den == 0.0) return num == 0.0 ? 0.0 : num / std::numeric_limits<double>::min();
  return num / den;
}

std::string reference_snapshot_path(const std::string& dir, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snapshot_%04zu.bin", i);
  return dir + "/" + buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) fields.push_back(cur);
  return fields;
}

/// Largest step no larger than `target` that lands every snapshot on an
/// integer number of steps (the integrator requires exact grid alignment;
/// benchmark grids are uniform, so dividing the first gap suffices).
double aligned_step(const std::vector<double>& grid, double target) {
  if (grid.size() < 2) return target;
  double gap = grid[1] - grid[0];
  double q = std::max(1.0, std::ceil(gap / target - 1e-9));
  return gap / q;
}

}  // namespace

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> methods = {
      "spectral", "voc_split", "expm_direct", "taylor", "krylov",
      "bdf1",     "bdf2",      "bdf3",        "bdf4",   "bdf5",  "bdf6"};
  return methods;
}

SolveReport run_method(const GeneratedProblem& gen, const std::string& method,
                       const BenchConfig& cfg) {
  if (method == "spectral") return solve_spectral(gen.dense_problem());
  if (method == "voc_split") return solve_voc_split(gen.dense_problem());
  if (method == "expm_direct") return solve_expm_direct(gen.dense_problem());
  if (method == "taylor") return solve_taylor(gen.dense_problem(), cfg.taylor_tol);
  if (method == "krylov") {
    return solve_projected_dse(gen.A, gen.B, gen.C, gen.D, gen.t_grid,
                               cfg.krylov_tol, cfg.krylov_max_order);
  }
  if (method.size() == 4 && method.compare(0, 3, "bdf") == 0 && method[3] >= '1' &&
      method[3] <= '6') {
    BdfConfig bcfg;
    bcfg.order = method[3] - '0';
    bcfg.step_size = aligned_step(gen.t_grid, cfg.bdf_step);
    bcfg.startup = cfg.bdf_startup;
    return bdf_integrate(gen.dense_problem(), bcfg);
  }
  std::string known;
  for (const auto& name : known_methods()) known += (known.empty() ? "" : ", ") + name;
  throw std::invalid_argument("unknown method '" + method + "' (known: " + known + ")");
}

std::vector<BenchmarkRecord> run_comparison(const ProblemSpec& spec,
                                            const std::vector<std::string>& methods,
                                            const BenchConfig& cfg) {
  GeneratedProblem gen = generate_problem(spec);
  const Index n = gen.A.rows();
  const Index m = gen.B.rows();

  std::vector<Matrix> reference;
  reference.reserve(gen.t_grid.size());
  if (!cfg.reference_dir.empty()) {
    for (std::size_t i = 0; i < gen.t_grid.size(); ++i) {
      Matrix X = read_snapshot(reference_snapshot_path(cfg.reference_dir, i));
      require(X.rows() == n && X.cols() == m,
              "run_comparison: reference snapshot shape mismatch");
      reference.push_back(std::move(X));
    }
  } else if (static_cast<long long>(n) * static_cast<long long>(m) <= cfg.dense_cap) {
    SolveReport ref = solve_spectral(gen.dense_problem());
    reference = std::move(ref.snapshots);
  } else {
    throw ReferenceInfeasibleError(
        "run_comparison: problem has " + std::to_string(n) + " x " +
        std::to_string(m) +
        " entries, beyond the dense reference cap; supply reference_dir");
  }

  std::vector<BenchmarkRecord> records;
  records.reserve(methods.size());
  for (const std::string& method : methods) {
    SolveReport rep = run_method(gen, method, cfg);
    BenchmarkRecord rec;
    rec.method = method;
    rec.problem = spec.digest();
    rec.t_grid = rep.t_grid;
    rec.residuals = rep.residual_norms;
    rec.wall_time_s = rep.wall_time_s;
    rec.dim_or_order = rep.dim_or_order;
    rec.converged = rep.converged;
    rec.rel_errors.reserve(reference.size());
    rec.rel_errors_2.reserve(reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i) {
      Matrix X = rep.snapshot_dense(i);
      rec.rel_errors.push_back(rel_error_fro(X, reference[i]));
      rec.rel_errors_2.push_back(rel_error_two(X, reference[i]));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_csv(const std::string& path, const std::vector<BenchmarkRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
  out << kCsvHeader << "\n";
  for (const BenchmarkRecord& rec : records) {
    for (std::size_t i = 0; i < rec.t_grid.size(); ++i) {
      double err = i < rec.rel_errors.size() ? rec.rel_errors[i] : 0.0;
      double res = i < rec.residuals.size() ? rec.residuals[i] : 0.0;
      out << rec.method << ',' << i << ',' << fmt17(rec.t_grid[i]) << ','
          << fmt17(err) << ',' << fmt17(res) << ',' << fmt17(rec.wall_time_s) << ','
          << rec.dim_or_order << "\n";
    }
  }
  if (!out) throw std::runtime_error("write_csv: failed writing '" + path + "'");
}

std::vector<BenchmarkRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("read_csv: '" + path + "' lacks the results.csv header");
  }
  std::vector<BenchmarkRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 7) {
      throw std::runtime_error("read_csv: malformed row '" + line + "'");
    }
    if (records.empty() || records.back().method != f[0]) {
      records.emplace_back();
      records.back().method = f[0];
    }
    BenchmarkRecord& rec = records.back();
    rec.t_grid.push_back(std::stod(f[2]));
    rec.rel_errors.push_back(std::stod(f[3]));
    rec.residuals.push_back(std::stod(f[4]));
    rec.wall_time_s = std::stod(f[5]);
    rec.dim_or_order = std::stoi(f[6]);
  }
  return records;
}

void write_json(const std::string& path, const ProblemSpec& spec,
                const std::vector<BenchmarkRecord>& records) {
  nlohmann::json j;
  j["problem"] = spec.digest();
  j["records"] = nlohmann::json::array();
  for (const BenchmarkRecord& rec : records) {
    nlohmann::json r;
    r["method"] = rec.method;
    r["t"] = rec.t_grid;
    r["rel_error_fro"] = rec.rel_errors;
    r["rel_error_2"] = rec.rel_errors_2;
    r["residual"] = rec.residuals;
    r["wall_time_s"] = rec.wall_time_s;
    r["dim_or_order"] = rec.dim_or_order;
    r["converged"] = rec.converged;
    j["records"].push_back(std::move(r));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_json: cannot open '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write_json: failed writing '" + path + "'");
}

}  // namespace diffsylv
