#pragma once

#include <vector>

#include "mnpca/types.hpp"

namespace mnpca {

struct RankSelection {
  int k_max = 10;
  double tau = 0.8;
  int chosen_r = 1;
  std::vector<double> variance_profile;  // cumulative, last entry 1
};

/// Variance-explained rank rule on the top-k_max singular values of the
/// (optionally centered) data: smallest r with cumulative share > tau.
/// Data with fewer than 15 columns always selects rank 2.
RankSelection select_rank(const Matrix& y, int k_max = 10, double tau = 0.8,
                          bool center = true);

}  // namespace mnpca
