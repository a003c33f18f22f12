#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace mnpca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Centralized numeric tolerances.
inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kFactorResidualTol = 1e-8;
inline constexpr double kSpdFloorEig = 1e-12;

struct NonFiniteError : std::runtime_error {
  explicit NonFiniteError(const std::string& what) : std::runtime_error(what) {}
};

struct NotPositiveDefiniteError : std::runtime_error {
  explicit NotPositiveDefiniteError(const std::string& what)
      : std::runtime_error(what) {}
};

struct RankTooLargeError : std::invalid_argument {
  explicit RankTooLargeError(const std::string& what)
      : std::invalid_argument(what) {}
};

struct ShapeError : std::invalid_argument {
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

struct DegenerateCovarianceError : std::runtime_error {
  explicit DegenerateCovarianceError(const std::string& what)
      : std::runtime_error(what) {}
};

struct MaxIterExceeded : std::runtime_error {
  explicit MaxIterExceeded(const std::string& what)
      : std::runtime_error(what) {}
};

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

inline void require_finite(const Matrix& a, const char* name) {
  if (!a.allFinite())
    throw NonFiniteError(std::string(name) + " contains NaN/Inf");
}

inline void require_symmetric(const Matrix& a, const char* name,
                              double tol = kSymmetryTol) {
  if (a.rows() != a.cols())
    throw ShapeError(std::string(name) + " is not square");
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw ShapeError(std::string(name) + " is not symmetric");
}

/// Symmetric matrix with sparse off-diagonal storage. Entries are kept
/// in the upper triangle (i < j); densification mirrors them.
struct SparseSymmetric {
  struct Entry {
    int i;
    int j;
    double value;
  };

  int dim = 0;
  Vector diag;
  std::vector<Entry> offdiag;  // i < j, unique keys

  SparseSymmetric() = default;
  explicit SparseSymmetric(int d) : dim(d), diag(Vector::Zero(d)) {}

  static SparseSymmetric identity(int d) {
    SparseSymmetric s(d);
    s.diag.setOnes();
    return s;
  }

  /// Keep off-diagonals with |value| > drop_tol.
  static SparseSymmetric from_dense(const Matrix& a, double drop_tol = 0.0);

  Matrix dense() const;

  std::size_t nnz_offdiag() const { return offdiag.size(); }
};

inline SparseSymmetric SparseSymmetric::from_dense(const Matrix& a,
                                                   double drop_tol) {
  require_symmetric(a, "SparseSymmetric input", 1e-8);
  SparseSymmetric s(static_cast<int>(a.rows()));
  s.diag = a.diagonal();
  for (int i = 0; i < s.dim; ++i)
    for (int j = i + 1; j < s.dim; ++j)
      if (std::abs(a(i, j)) > drop_tol)
        s.offdiag.push_back({i, j, 0.5 * (a(i, j) + a(j, i))});
  return s;
}

inline Matrix SparseSymmetric::dense() const {
  Matrix a = Matrix::Zero(dim, dim);
  a.diagonal() = diag;
  for (const auto& e : offdiag) {
    a(e.i, e.j) = e.value;
    a(e.j, e.i) = e.value;
  }
  return a;
}

}  // namespace mnpca
