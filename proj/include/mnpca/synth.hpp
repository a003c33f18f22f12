#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mnpca/types.hpp"

namespace mnpca {

enum class CentroidPattern { SmallScale, LargeScale };

struct SyntheticSpec {
  int n = 300;
  int p = 200;
  int r = 3;  // number of centroids
  double alpha1 = 0.01;
  double alpha2 = 0.01;
  double c1 = 1.0;
  double c2 = 1.0;
  CentroidPattern centroid_pattern = CentroidPattern::SmallScale;
  std::uint64_t seed = 0;
};

struct SyntheticInstance {
  Matrix y;
  Matrix m_true;
  SparseSymmetric omega_inv_true;  // n x n row precision
  SparseSymmetric sigma_inv_true;  // p x p column precision
  std::vector<int> labels;
  SyntheticSpec spec;
};

/// Sparse SPD matrix with off-diagonal density ~alpha and condition number
/// exactly c. The spectrum is mapped affinely (preserving the sparsity
/// pattern) and rescaled so that, read as a precision, the implied
/// covariance has median eigenvalue 1 and largest-to-smallest eigenvalue
/// ratio c. c=1 yields the identity.
SparseSymmetric gen_sparse_spd(int dim, double alpha, double c,
                               std::uint64_t seed);

/// Three +-1 end-block centroids of width 20, rows grouped by centroid,
/// matrix-normal noise from the generated precisions.
SyntheticInstance gen_small_scale(const SyntheticSpec& spec);

/// Same protocol with 10%-of-features end blocks.
SyntheticInstance gen_large_scale(const SyntheticSpec& spec);

/// Two interleaved rolls in 3D: (t cos t, h, t sin t) with distinct radial
/// offsets; returns points and per-roll labels.
std::pair<Matrix, std::vector<int>> gen_swiss_roll(int n_per_roll,
                                                   std::uint64_t seed);

/// Matrix-normal sample E ~ MN(0, Omega, Sigma) given the precisions,
/// via Cholesky factors and triangular solves.
Matrix sample_matrix_normal(const Matrix& omega_inv, const Matrix& sigma_inv,
                            int n, int p, std::uint64_t seed);

}  // namespace mnpca
