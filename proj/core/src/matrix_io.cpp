#include "npcg/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace npcg::io {

namespace {

[[noreturn]] void parse_error(const std::string& path, long line, const std::string& what) {
  std::ostringstream msg;
  msg << "load_matrix - " << path << ":" << line << ": " << what;
  throw std::runtime_error(msg.str());
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Matrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_matrix - cannot open " + path);
  long line_no = 0;
  std::string line;

  if (!std::getline(in, line)) parse_error(path, 1, "empty file");
  ++line_no;
  std::istringstream banner(line);
  std::string tag, object, fmt, field, symmetry;
  banner >> tag >> object >> fmt >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lowercase(object) != "matrix")
    parse_error(path, line_no, "expected a MatrixMarket banner");
  if (lowercase(fmt) != "coordinate")
    parse_error(path, line_no, "only coordinate format is supported");
  if (lowercase(field) != "real" && lowercase(field) != "integer")
    parse_error(path, line_no, "only real-valued matrices are supported");
  const std::string sym = lowercase(symmetry);
  if (sym != "symmetric" && sym != "general")
    parse_error(path, line_no, "only general or symmetric matrices are supported");
  const bool mirror = sym == "symmetric";

  Index rows = 0, cols = 0;
  long entries = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream sizes(line);
    if (!(sizes >> rows >> cols >> entries))
      parse_error(path, line_no, "malformed size line");
    break;
  }
  if (entries < 0) parse_error(path, line_no, "missing size line");
  if (rows < 1 || cols < 1) parse_error(path, line_no, "dimensions must be positive");
  if (mirror && rows != cols)
    parse_error(path, line_no, "a symmetric matrix must be square");

  Matrix m = Matrix::Zero(rows, cols);
  long seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    Index i = 0, j = 0;
    double value = 0.0;
    if (!(entry >> i >> j >> value)) parse_error(path, line_no, "malformed entry");
    if (i < 1 || i > rows || j < 1 || j > cols)
      parse_error(path, line_no, "entry index out of range");
    if (mirror && j > i)
      parse_error(path, line_no, "symmetric entries must lie on or below the diagonal");
    m(i - 1, j - 1) = value;
    if (mirror && i != j) m(j - 1, i - 1) = value;
    ++seen;
  }
  if (seen != entries) {
    std::ostringstream msg;
    msg << "expected " << entries << " entries, found " << seen;
    parse_error(path, line_no, msg.str());
  }
  return m;
}

Matrix load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_matrix - cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        std::size_t used = 0;
        const double value = std::stod(field, &used);
        while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used])))
          ++used;
        if (used != field.size()) throw std::invalid_argument(field);
        row.push_back(value);
      } catch (const std::exception&) {
        parse_error(path, line_no, "malformed number '" + field + "'");
      }
    }
    if (row.empty()) parse_error(path, line_no, "empty row");
    if (!rows.empty() && row.size() != rows.front().size())
      parse_error(path, line_no, "inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) parse_error(path, 1, "empty file");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

Matrix load_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_matrix - cannot open " + path);
  std::uint64_t dims[2] = {0, 0};
  if (!in.read(reinterpret_cast<char*>(dims), sizeof(dims)))
    throw std::runtime_error("load_matrix - " + path + ": truncated raw-f64 header");
  const Index rows = static_cast<Index>(dims[0]);
  const Index cols = static_cast<Index>(dims[1]);
  if (rows < 1 || cols < 1 || rows > (1 << 24) || cols > (1 << 24))
    throw std::runtime_error("load_matrix - " + path + ": implausible raw-f64 dimensions");
  Matrix m(rows, cols);
  std::vector<double> row(static_cast<std::size_t>(cols));
  for (Index i = 0; i < rows; ++i) {
    if (!in.read(reinterpret_cast<char*>(row.data()),
                 static_cast<std::streamsize>(sizeof(double) * row.size())))
      throw std::runtime_error("load_matrix - " + path + ": truncated raw-f64 payload");
    for (Index j = 0; j < cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
  }
  return m;
}

void save_matrix_market(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_matrix - cannot open " + path);
  out.precision(17);
  const double scale = m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  const bool symmetric =
      m.rows() == m.cols() &&
      (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, scale);
  long entries = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = symmetric ? j : 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) ++entries;
  out << "%%MatrixMarket matrix coordinate real "
      << (symmetric ? "symmetric" : "general") << "\n";
  out << m.rows() << " " << m.cols() << " " << entries << "\n";
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = symmetric ? j : 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) out << i + 1 << " " << j + 1 << " " << m(i, j) << "\n";
}

void save_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_matrix - cannot open " + path);
  out.precision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ",";
      out << m(i, j);
    }
    out << "\n";
  }
}

void save_raw(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_matrix - cannot open " + path);
  const std::uint64_t dims[2] = {static_cast<std::uint64_t>(m.rows()),
                                 static_cast<std::uint64_t>(m.cols())};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  std::vector<double> row(static_cast<std::size_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(double) * row.size()));
  }
}

}  // namespace

MatrixFormat parse_format(const std::string& name) {
  if (name == "matrix-market") return MatrixFormat::matrix_market;
  if (name == "csv-dense") return MatrixFormat::csv_dense;
  if (name == "raw-f64") return MatrixFormat::raw_f64;
  throw std::invalid_argument("parse_format: unknown format '" + name + "'");
}

std::string format_name(MatrixFormat format) {
  switch (format) {
    case MatrixFormat::matrix_market: return "matrix-market";
    case MatrixFormat::csv_dense: return "csv-dense";
    case MatrixFormat::raw_f64: return "raw-f64";
  }
  throw std::invalid_argument("format_name: unknown format");
}

Matrix load_matrix(const std::string& path, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::matrix_market: return load_matrix_market(path);
    case MatrixFormat::csv_dense: return load_csv(path);
    case MatrixFormat::raw_f64: return load_raw(path);
  }
  throw std::invalid_argument("load_matrix: unknown format");
}

void save_matrix(const std::string& path, const Matrix& m, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::matrix_market: save_matrix_market(path, m); return;
    case MatrixFormat::csv_dense: save_csv(path, m); return;
    case MatrixFormat::raw_f64: save_raw(path, m); return;
  }
  throw std::invalid_argument("save_matrix: unknown format");
}

Vector load_vector(const std::string& path, MatrixFormat format) {
  const Matrix m = load_matrix(path, format);
  if (m.cols() != 1)
    throw std::runtime_error("load_vector - " + path + ": expected a single column");
  return m.col(0);
}

Matrix require_symmetric(Matrix m, const std::string& context) {
  if (m.rows() != m.cols())
    throw std::runtime_error(context + ": matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::runtime_error(context + ": matrix is not symmetric");
  return m;
}

}  // namespace npcg::io
