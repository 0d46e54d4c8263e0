#pragma once

#include <string>

#include "npcg/types.hpp"

namespace npcg::io {

/**
 * Supported on-disk formats:
 *  - matrix-market: coordinate real, "symmetric" (entries mirrored on load)
 *    or "general";
 *  - csv-dense: one row per line, comma-separated, row-major;
 *  - raw-f64: 16-byte header of two little-endian uint64 dims (rows, cols)
 *    followed by rows*cols little-endian doubles in row-major order.
 */
enum class MatrixFormat { matrix_market, csv_dense, raw_f64 };

/// Parses "matrix-market" | "csv-dense" | "raw-f64"; rejects anything else.
MatrixFormat parse_format(const std::string& name);
std::string format_name(MatrixFormat format);

/// Loads a dense matrix; parse failures report the offending line number.
Matrix load_matrix(const std::string& path, MatrixFormat format);

/// Writes a dense matrix; raw-f64 round-trips bitwise.
void save_matrix(const std::string& path, const Matrix& m, MatrixFormat format);

/// Loads a single-column matrix as a vector (rejects multi-column input).
Vector load_vector(const std::string& path, MatrixFormat format);

/// Rejects matrices that are not symmetric to within 1e-12 relative; returns
/// the input unchanged otherwise.  Used when a file feeds a symmetric slot.
Matrix require_symmetric(Matrix m, const std::string& context);

}  // namespace npcg::io
