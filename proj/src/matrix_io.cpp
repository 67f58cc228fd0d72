#include "diffsylv/matrix_io.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

namespace diffsylv {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("matrix_io: " + path + ": " + what);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Reads the next line that is neither blank nor a '%' comment.
bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    std::size_t pos = line.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos) continue;
    if (line[pos] == '%') continue;
    return true;
  }
  return false;
}

struct Header {
  std::string format;    // array | coordinate
  std::string field;     // real | complex | integer | pattern
  std::string symmetry;  // general | symmetric | skew-symmetric | hermitian
};

Header parse_header(std::istream& in, const std::string& path) {
  std::string banner;
  if (!std::getline(in, banner)) fail(path, "empty file");
  std::istringstream hs(banner);
  std::string magic, object;
  Header h;
  hs >> magic >> object >> h.format >> h.field >> h.symmetry;
  if (lower(magic) != "%%matrixmarket") fail(path, "missing %%MatrixMarket banner");
  if (lower(object) != "matrix") fail(path, "unsupported object '" + object + "'");
  h.format = lower(h.format);
  h.field = lower(h.field);
  h.symmetry = lower(h.symmetry);
  if (h.format != "array" && h.format != "coordinate")
    fail(path, "unsupported format '" + h.format + "'");
  if (h.field != "real" && h.field != "complex" && h.field != "integer" &&
      h.field != "pattern")
    fail(path, "unsupported field '" + h.field + "'");
  if (h.symmetry != "general" && h.symmetry != "symmetric" &&
      h.symmetry != "skew-symmetric" && h.symmetry != "hermitian")
    fail(path, "unsupported symmetry '" + h.symmetry + "'");
  if (h.format == "array" && h.field == "pattern")
    fail(path, "pattern field is not defined for array format");
  return h;
}

Complex read_value(std::istringstream& ls, const Header& h, const std::string& path) {
  if (h.field == "pattern") return Complex{1.0, 0.0};
  double re = 0.0, im = 0.0;
  if (!(ls >> re)) fail(path, "malformed numeric entry");
  if (h.field == "complex" && !(ls >> im)) fail(path, "complex entry missing imaginary part");
  return Complex{re, im};
}

// Appends entry plus its symmetry image (lower triangle is what's stored).
void push_with_symmetry(CooData& out, const Header& h, Index i, Index j, Complex v,
                        const std::string& path) {
  if (i < 0 || j < 0 || i >= out.rows || j >= out.cols) fail(path, "index out of range");
  if (h.symmetry != "general" && j > i) fail(path, "upper-triangle entry in symmetric file");
  if (h.symmetry == "skew-symmetric" && i == j) fail(path, "diagonal entry in skew-symmetric file");
  out.entries.emplace_back(i, j, v);
  if (i == j || h.symmetry == "general") return;
  if (h.symmetry == "symmetric") out.entries.emplace_back(j, i, v);
  if (h.symmetry == "skew-symmetric") out.entries.emplace_back(j, i, -v);
  if (h.symmetry == "hermitian") out.entries.emplace_back(j, i, std::conj(v));
}

}  // namespace

CooData read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open for reading");
  Header h = parse_header(in, path);

  std::string line;
  if (!next_data_line(in, line)) fail(path, "missing size line");
  std::istringstream ss(line);
  CooData out;

  if (h.format == "coordinate") {
    long long rows = 0, cols = 0, nnz = 0;
    if (!(ss >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
      fail(path, "malformed coordinate size line");
    out.rows = rows;
    out.cols = cols;
    out.entries.reserve(static_cast<std::size_t>(nnz));
    for (long long k = 0; k < nnz; ++k) {
      if (!next_data_line(in, line)) fail(path, "fewer entries than declared");
      std::istringstream ls(line);
      long long i = 0, j = 0;
      if (!(ls >> i >> j)) fail(path, "malformed entry line");
      Complex v = read_value(ls, h, path);
      push_with_symmetry(out, h, i - 1, j - 1, v, path);
    }
  } else {
    long long rows = 0, cols = 0;
    if (!(ss >> rows >> cols) || rows < 0 || cols < 0)
      fail(path, "malformed array size line");
    out.rows = rows;
    out.cols = cols;
    // Array files store column-major: all of column j, then j+1; symmetric
    // variants store only i >= j (skew: i > j).
    for (Index j = 0; j < out.cols; ++j) {
      Index i0 = 0;
      if (h.symmetry == "symmetric" || h.symmetry == "hermitian") i0 = j;
      if (h.symmetry == "skew-symmetric") i0 = j + 1;
      for (Index i = i0; i < out.rows; ++i) {
        if (!next_data_line(in, line)) fail(path, "fewer array entries than declared");
        std::istringstream ls(line);
        Complex v = read_value(ls, h, path);
        push_with_symmetry(out, h, i, j, v, path);
      }
    }
  }
  return out;
}

Matrix read_matrix_market_dense(const std::string& path) {
  CooData coo = read_matrix_market(path);
  Matrix M = Matrix::Zero(coo.rows, coo.cols);
  for (const auto& t : coo.entries) M(t.row(), t.col()) += t.value();
  require_finite(M, "read_matrix_market_dense(" + path + ")");
  return M;
}

namespace {

void write_g17(std::FILE* f, double x) { std::fprintf(f, "%.17g", x); }

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

}  // namespace

void write_matrix_market_dense(const std::string& path, const Matrix& M) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "w"));
  if (!f) fail(path, "cannot open for writing");
  std::fprintf(f.get(), "%%%%MatrixMarket matrix array complex general\n");
  std::fprintf(f.get(), "%lld %lld\n", static_cast<long long>(M.rows()),
               static_cast<long long>(M.cols()));
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      write_g17(f.get(), M(i, j).real());
      std::fputc(' ', f.get());
      write_g17(f.get(), M(i, j).imag());
      std::fputc('\n', f.get());
    }
  }
}

void write_matrix_market_coordinate(const std::string& path, Index rows, Index cols,
                                    const std::vector<Eigen::Triplet<Complex>>& entries) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "w"));
  if (!f) fail(path, "cannot open for writing");
  std::fprintf(f.get(), "%%%%MatrixMarket matrix coordinate complex general\n");
  std::fprintf(f.get(), "%lld %lld %lld\n", static_cast<long long>(rows),
               static_cast<long long>(cols), static_cast<long long>(entries.size()));
  for (const auto& t : entries) {
    std::fprintf(f.get(), "%lld %lld ", static_cast<long long>(t.row() + 1),
                 static_cast<long long>(t.col() + 1));
    write_g17(f.get(), t.value().real());
    std::fputc(' ', f.get());
    write_g17(f.get(), t.value().imag());
    std::fputc('\n', f.get());
  }
}

namespace {
constexpr char kSnapshotMagic[8] = {'D', 'S', 'Y', 'L', 'V', 'S', 'N', 'P'};
}

void write_snapshot(const std::string& path, const Matrix& M) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");
  out.write(kSnapshotMagic, 8);
  std::uint64_t rows = static_cast<std::uint64_t>(M.rows());
  std::uint64_t cols = static_cast<std::uint64_t>(M.cols());
  out.write(reinterpret_cast<const char*>(&rows), 8);
  out.write(reinterpret_cast<const char*>(&cols), 8);
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      double re = M(i, j).real();
      double im = M(i, j).imag();
      out.write(reinterpret_cast<const char*>(&re), 8);
      out.write(reinterpret_cast<const char*>(&im), 8);
    }
  }
  if (!out) fail(path, "write failed");
}

Matrix read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kSnapshotMagic, 8) != 0)
    fail(path, "bad snapshot magic");
  std::uint64_t rows = 0, cols = 0;
  if (!in.read(reinterpret_cast<char*>(&rows), 8) ||
      !in.read(reinterpret_cast<char*>(&cols), 8))
    fail(path, "truncated snapshot header");
  if (rows > (1u << 30) || cols > (1u << 30)) fail(path, "implausible snapshot shape");
  Matrix M(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      double re = 0.0, im = 0.0;
      if (!in.read(reinterpret_cast<char*>(&re), 8) ||
          !in.read(reinterpret_cast<char*>(&im), 8))
        fail(path, "truncated snapshot payload");
      M(static_cast<Index>(i), static_cast<Index>(j)) = Complex{re, im};
    }
  }
  return M;
}

}  // namespace diffsylv
