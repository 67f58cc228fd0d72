#pragma once

#include "diffsylv/core.hpp"

#include <Eigen/SparseCore>

#include <string>
#include <vector>

/// Matrix Market readers/writers and the dense binary snapshot format.
///
/// Binary snapshot layout (little-endian):
///   bytes 0..7   magic "DSYLVSNP"
///   bytes 8..15  rows as uint64
///   bytes 16..23 cols as uint64
///   then rows*cols complex entries, row-major, each as two float64 (re, im)
namespace diffsylv {

/// Coordinate-form payload of a Matrix Market file (array files are expanded
/// to one triplet per stored entry; symmetry is already unfolded).
struct CooData {
  Index rows = 0;
  Index cols = 0;
  std::vector<Eigen::Triplet<Complex>> entries;
};

/// Reads either format (array or coordinate), fields real/complex/integer/
/// pattern, symmetries general/symmetric/skew-symmetric/hermitian.
/// Throws std::runtime_error on missing files or malformed content.
CooData read_matrix_market(const std::string& path);

/// Dense view of a Matrix Market file (duplicate coordinate entries summed).
Matrix read_matrix_market_dense(const std::string& path);

/// Writes M in array/complex/general format with %.17g round-trip precision.
void write_matrix_market_dense(const std::string& path, const Matrix& M);

/// Writes triplets in coordinate/complex/general format (1-based indices).
void write_matrix_market_coordinate(const std::string& path, Index rows, Index cols,
                                    const std::vector<Eigen::Triplet<Complex>>& entries);

/// Binary snapshot writer/reader; see the format note above.
void write_snapshot(const std::string& path, const Matrix& M);
Matrix read_snapshot(const std::string& path);

}  // namespace diffsylv
