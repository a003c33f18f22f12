#include "mnpca/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mnpca::io {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  require_finite(m, "CSV output");
  auto out = open_out(path);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ShapeError("non-rectangular CSV: " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty CSV: " + path.string());
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  if (!m.allFinite())
    throw NonFiniteError("CSV contains NaN/Inf: " + path.string());
  return m;
}

void write_labels_csv(const std::filesystem::path& path,
                      const std::vector<int>& labels) {
  auto out = open_out(path);
  for (int l : labels) out << l << '\n';
}

std::vector<int> read_labels_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) labels.push_back(std::stoi(line));
  return labels;
}

void write_edges(const std::filesystem::path& path, const SparseSymmetric& s) {
  auto out = open_out(path);
  out << "# dim " << s.dim << '\n';
  out << "# diag\n";
  for (int i = 0; i < s.dim; ++i) out << format_double(s.diag(i)) << '\n';
  out << "# offdiag\n";
  for (const auto& e : s.offdiag)
    out << e.i << ' ' << e.j << ' ' << format_double(e.value) << '\n';
}

SparseSymmetric read_edges(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# dim ", 0) != 0)
    throw std::runtime_error("bad edges header: " + path.string());
  SparseSymmetric s(std::stoi(line.substr(6)));

  enum { None, Diag, Offdiag } section = None;
  int diag_idx = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "# diag") {
      section = Diag;
    } else if (line == "# offdiag") {
      section = Offdiag;
    } else if (section == Diag) {
      s.diag(diag_idx++) = std::stod(line);
    } else if (section == Offdiag) {
      std::stringstream ss(line);
      SparseSymmetric::Entry e{};
      ss >> e.i >> e.j >> e.value;
      if (!(e.i < e.j && e.j < s.dim))
        throw std::runtime_error("bad edge indices: " + path.string());
      s.offdiag.push_back(e);
    } else {
      throw std::runtime_error("malformed edges file: " + path.string());
    }
  }
  if (diag_idx != s.dim)
    throw std::runtime_error("diag length mismatch: " + path.string());
  return s;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::uint64_t h = 14695981039346656037ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mnpca::io
