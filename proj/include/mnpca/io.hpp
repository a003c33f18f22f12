#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mnpca/types.hpp"

namespace mnpca::io {

/// Headerless row-major CSV with 17 significant digits (value-exact
/// round trip for doubles).
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

void write_labels_csv(const std::filesystem::path& path,
                      const std::vector<int>& labels);
std::vector<int> read_labels_csv(const std::filesystem::path& path);

/// Edge-list text format: "# diag" section with one value per line, then
/// "# offdiag" with "i j value" lines (0-based, i < j).
void write_edges(const std::filesystem::path& path, const SparseSymmetric& s);
SparseSymmetric read_edges(const std::filesystem::path& path);

/// FNV-1a 64-bit digest of a file's bytes, hex-encoded.
std::string file_digest(const std::filesystem::path& path);

}  // namespace mnpca::io
