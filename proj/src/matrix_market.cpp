#include "speclocal/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "speclocal/error.hpp"

namespace speclocal::mm {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void put_value(std::ostream& out, Complex v) { out << v.real() << ' ' << v.imag(); }

}  // namespace

void write(std::ostream& out, const Matrix& m, Layout layout, Symmetry symmetry) {
  const bool herm = symmetry == Symmetry::Hermitian;
  if (herm && m.rows() != m.cols()) {
    fail(ErrorCode::DimensionMismatch, "Matrix Market: hermitian storage needs a square matrix");
  }
  out << "%%MatrixMarket matrix " << (layout == Layout::Coordinate ? "coordinate" : "array")
      << " complex " << (herm ? "hermitian" : "general") << '\n';
  out << std::setprecision(17);
  if (layout == Layout::Array) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = herm ? j : 0; i < m.rows(); ++i) {
        put_value(out, m(i, j));
        out << '\n';
      }
    }
    return;
  }
  Index nnz = 0;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = herm ? j : 0; i < m.rows(); ++i) nnz += m(i, j) != Complex(0.0) ? 1 : 0;
  }
  out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = herm ? j : 0; i < m.rows(); ++i) {
      if (m(i, j) == Complex(0.0)) continue;
      out << i + 1 << ' ' << j + 1 << ' ';
      put_value(out, m(i, j));
      out << '\n';
    }
  }
}

void write_file(const std::filesystem::path& path, const Matrix& m, Layout layout,
                Symmetry symmetry) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::FormatError, "cannot open " + path.string() + " for writing");
  write(out, m, layout, symmetry);
  if (!out) fail(ErrorCode::FormatError, "write failed for " + path.string());
}

Matrix read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::FormatError, "empty Matrix Market stream");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix") {
    fail(ErrorCode::FormatError, "missing %%MatrixMarket matrix banner");
  }
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  const bool coordinate = format == "coordinate";
  if (!coordinate && format != "array") fail(ErrorCode::FormatError, "unknown format '" + format + "'");
  const bool complex_field = field == "complex";
  if (!complex_field && field != "real" && field != "integer" && field != "double") {
    fail(ErrorCode::FormatError, "unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian" &&
      symmetry != "skew-symmetric") {
    fail(ErrorCode::FormatError, "unsupported symmetry '" + symmetry + "'");
  }
  const bool mirrored = symmetry != "general";

  do {
    if (!std::getline(in, line)) fail(ErrorCode::FormatError, "missing size line");
  } while (line.empty() || line[0] == '%');
  std::istringstream size_line(line);
  long rows = 0, cols = 0, entries = 0;
  size_line >> rows >> cols;
  if (coordinate) size_line >> entries;
  if (!size_line || rows < 0 || cols < 0 || entries < 0) fail(ErrorCode::FormatError, "bad size line");
  if (mirrored && rows != cols) fail(ErrorCode::FormatError, "symmetric storage of a non-square matrix");

  Matrix m = Matrix::Zero(rows, cols);
  auto read_value = [&](std::istream& s) {
    double re = 0.0, im = 0.0;
    s >> re;
    if (complex_field) s >> im;
    if (!s) fail(ErrorCode::FormatError, "malformed matrix entry");
    return Complex(re, im);
  };
  auto place = [&](long i, long j, Complex v) {
    if (i < 0 || j < 0 || i >= rows || j >= cols) fail(ErrorCode::FormatError, "entry index out of range");
    m(i, j) = v;
    if (!mirrored || i == j) return;
    if (symmetry == "hermitian") {
      m(j, i) = std::conj(v);
    } else if (symmetry == "symmetric") {
      m(j, i) = v;
    } else {
      m(j, i) = -v;
    }
  };

  if (coordinate) {
    for (long k = 0; k < entries; ++k) {
      long i = 0, j = 0;
      if (!(in >> i >> j)) fail(ErrorCode::FormatError, "truncated coordinate data");
      place(i - 1, j - 1, read_value(in));
    }
  } else {
    for (long j = 0; j < cols; ++j) {
      const long start = mirrored ? (symmetry == "skew-symmetric" ? j + 1 : j) : 0;
      for (long i = start; i < rows; ++i) place(i, j, read_value(in));
    }
  }
  return m;
}

Matrix read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FormatError, "cannot open " + path.string());
  return read(in);
}

}  // namespace speclocal::mm
