#include "mnpca/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace mnpca {

TruncatedSvd truncated_svd(const Matrix& a, int k) {
  require_finite(a, "truncated_svd input");
  const int kmax = static_cast<int>(std::min(a.rows(), a.cols()));
  if (k < 1 || k > kmax)
    throw RankTooLargeError("truncated_svd: k = " + std::to_string(k) +
                            " out of range [1, " + std::to_string(kmax) + "]");

  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.u = svd.matrixU().leftCols(k);
  out.s = svd.singularValues().head(k);
  out.v = svd.matrixV().leftCols(k);

  // Sign convention: largest-magnitude entry of each v column positive.
  for (int c = 0; c < k; ++c) {
    int idx = 0;
    out.v.col(c).cwiseAbs().maxCoeff(&idx);
    if (out.v(idx, c) < 0.0) {
      out.v.col(c) = -out.v.col(c);
      out.u.col(c) = -out.u.col(c);
    }
  }
  return out;
}

Matrix cholesky(const Matrix& a) {
  require_finite(a, "cholesky input");
  require_symmetric(a, "cholesky input");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefiniteError("cholesky: matrix is not positive definite");
  return llt.matrixL();
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  require_finite(a, "solve_spd lhs");
  require_finite(b, "solve_spd rhs");
  if (a.rows() != b.rows()) throw ShapeError("solve_spd: dimension mismatch");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefiniteError("solve_spd: lhs is not positive definite");
  return llt.solve(b);
}

SymEig sym_eig(const Matrix& a) {
  require_finite(a, "sym_eig input");
  require_symmetric(a, "sym_eig input", 1e-8);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success)
    throw NonFiniteError("sym_eig: eigensolver failed");
  const int n = static_cast<int>(a.rows());
  SymEig out;
  out.values = es.eigenvalues().reverse();
  out.vectors.resize(n, n);
  for (int c = 0; c < n; ++c) out.vectors.col(c) = es.eigenvectors().col(n - 1 - c);
  return out;
}

Matrix sym_sqrt(const Matrix& a) {
  SymEig eig = sym_eig(a);
  const double scale = std::max(1.0, std::abs(eig.values(0)));
  Vector root = eig.values;
  for (int i = 0; i < root.size(); ++i) {
    if (root(i) < -kSpdFloorEig * scale * 100)
      throw NotPositiveDefiniteError("sym_sqrt: negative eigenvalue");
    root(i) = std::sqrt(std::max(root(i), 0.0));
  }
  return eig.vectors * root.asDiagonal() * eig.vectors.transpose();
}

double positive_median(const Vector& sorted_desc) {
  Eigen::Index k = sorted_desc.size();
  while (k > 1 && sorted_desc(k - 1) <= 1e-12 * sorted_desc(0)) --k;
  return k % 2 == 1 ? sorted_desc(k / 2)
                    : 0.5 * (sorted_desc(k / 2 - 1) + sorted_desc(k / 2));
}

Matrix clamped_inverse_sqrt(const Matrix& cov) {
  SymEig eig = sym_eig(cov);
  Vector w = eig.values;
  const double floor = std::max(positive_median(w), 1e-12 * w(0));
  if (!(floor > 0.0))
    return Matrix::Identity(cov.rows(), cov.cols());  // degenerate input
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w(i) = 1.0 / std::sqrt(std::max(w(i), floor));
  return eig.vectors * w.asDiagonal() * eig.vectors.transpose();
}

}  // namespace mnpca
