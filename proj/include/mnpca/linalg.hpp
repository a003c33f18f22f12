#pragma once

#include "mnpca/types.hpp"

namespace mnpca {

/// Rank-k factorization with orthonormal u, v and nonincreasing s.
struct TruncatedSvd {
  Matrix u;  // n x k
  Vector s;  // k, nonincreasing, >= 0
  Matrix v;  // p x k

  Matrix reconstruction() const { return u * s.asDiagonal() * v.transpose(); }
};

/// Top-k singular triplets. Singular vectors are sign-canonicalized so the
/// largest-magnitude entry of each v column is positive.
TruncatedSvd truncated_svd(const Matrix& a, int k);

/// Lower-triangular L with L L^T = a. Throws NotPositiveDefiniteError.
Matrix cholesky(const Matrix& a);

/// Solve a x = b for SPD a.
Matrix solve_spd(const Matrix& a, const Matrix& b);

struct SymEig {
  Vector values;   // nonincreasing
  Matrix vectors;  // orthonormal columns, vectors.col(i) pairs values(i)
};

/// Full symmetric eigendecomposition.
SymEig sym_eig(const Matrix& a);

/// Symmetric PSD square root via eigendecomposition; negative eigenvalues
/// below -kSpdFloorEig*scale are rejected, small ones clamped to zero.
Matrix sym_sqrt(const Matrix& a);

/// Median of the eigenvalues that are not numerically zero, given the
/// spectrum in nonincreasing order (covariances of rank-deficient
/// residuals carry a block of exact zeros that would skew a plain median).
double positive_median(const Vector& sorted_desc);

/// Inverse square root of a covariance with its spectrum floored at the
/// positive-median eigenvalue: directions stronger than the bulk are
/// whitened down to it, the bulk itself is left alone. Identity for
/// degenerate (all-zero) input.
Matrix clamped_inverse_sqrt(const Matrix& cov);

}  // namespace mnpca
