#pragma once

// Matrix interchange: {"n": int, "entries": [[re, im], ...]} row-major.
// Doubles are written with 17 significant digits so write-then-read is
// bit-exact.

#include <filesystem>
#include <string>
#include <string_view>

#include "orbitgeo/linalg.hpp"

namespace orbitgeo::io {

std::string matrix_to_json(const Matrix& a);
/// Throws format on malformed JSON, wrong entry count or non-finite values.
Matrix matrix_from_json(std::string_view text);

void write_matrix(const std::filesystem::path& path, const Matrix& a);
Matrix read_matrix(const std::filesystem::path& path);

/// Whole file as a string; throws format when it cannot be opened.
std::string read_text(const std::filesystem::path& path);

/// Shortest-safe decimal for a finite double ("1.0", "-0.0", "0.10000000000000001").
std::string format_double(double x);

}  // namespace orbitgeo::io
