#pragma once

#include <cstdint>
#include <vector>

#include "mnpca/types.hpp"

namespace mnpca {

/// ||m_hat - m_true||_F / sqrt(n p)
double rmse(const Matrix& m_hat, const Matrix& m_true);

/// -20 log10(rmse); +inf sentinel for an exact match.
double psnr(const Matrix& m_hat, const Matrix& m_true);

/// Lloyd's algorithm with k-means++ seeding and `restarts` restarts; the
/// labeling with the lowest inertia wins. Deterministic for a fixed seed.
std::vector<int> kmeans(const Matrix& points, int k, std::uint64_t seed,
                        int restarts = 10);

/// Normalized mutual information in percent; normalization by the
/// arithmetic mean of the two label entropies.
double nmi(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

struct SupportMetrics {
  double tpr = 0.0;
  double tnr = 0.0;
  double ppv = 0.0;
  bool empty_prediction = false;  // ppv reported as 0 in that case
};

/// Off-diagonal support recovery. Truth support is the top_k entries of
/// theta_true by absolute value (unordered pairs); the estimate's support is
/// its nonzero off-diagonals, truncated to its own top_k when larger.
SupportMetrics support_metrics(const SparseSymmetric& theta_hat,
                               const SparseSymmetric& theta_true, int top_k);

struct EvalReport {
  double rmse = 0.0;
  double psnr = 0.0;
  double nmi = 0.0;  // percent
  SupportMetrics omega;  // row precision
  SupportMetrics sigma;  // column precision
};

}  // namespace mnpca
