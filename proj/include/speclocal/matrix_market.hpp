#pragma once

#include <filesystem>
#include <iosfwd>

#include "speclocal/linalg.hpp"

namespace speclocal::mm {

enum class Layout { Coordinate, Array };
enum class Symmetry { General, Hermitian };

/// Writes a complex matrix with 17 significant digits. Hermitian symmetry
/// stores the lower triangle only; the caller is responsible for the matrix
/// actually being Hermitian.
void write(std::ostream& out, const Matrix& m, Layout layout = Layout::Coordinate,
           Symmetry symmetry = Symmetry::General);
void write_file(const std::filesystem::path& path, const Matrix& m,
                Layout layout = Layout::Coordinate, Symmetry symmetry = Symmetry::General);

/// Reads real, integer or complex matrices in coordinate or array layout with
/// general, symmetric, skew-symmetric or hermitian symmetry. Raises FormatError.
Matrix read(std::istream& in);
Matrix read_file(const std::filesystem::path& path);

}  // namespace speclocal::mm
