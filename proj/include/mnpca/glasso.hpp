#pragma once

#include <array>
#include <vector>

#include "mnpca/types.hpp"

namespace mnpca {

/// L1-penalized precision estimation problem: minimize
///   -log det(Theta) + tr(S Theta) + rho * ||Theta||_1
/// over positive-definite Theta. The L1 norm includes the diagonal.
struct GlassoProblem {
  Matrix s;    // empirical covariance, symmetric PSD
  double rho;  // >= 0
  Matrix init; // optional PD warm start; empty selects a diagonal start
};

struct GlassoSolution {
  SparseSymmetric theta;  // estimated precision
  Matrix theta_dense;
  double objective = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = true;
};

double glasso_objective(const GlassoProblem& p, const Matrix& theta);

/// Proximal-gradient solver with a PD-guarding backtracking line search,
/// run per connected component of the screened graph {|S_ij| > rho}.
GlassoSolution solve_glasso(const GlassoProblem& p, double tol = 1e-6,
                            int max_iter = 200);

/// Blocks of the graph on {0..p-1} with edges {(i,j): |S_ij| > rho}.
std::vector<std::vector<int>> connected_components(const Matrix& s, double rho);

struct LambdaGrid {
  std::array<double, 10> values;  // nondecreasing, log-spaced
};

/// Ten log-spaced penalties from 0.1*max|offdiag(S)| up to max|offdiag(S)|.
/// Throws DegenerateCovarianceError if S has no nonzero off-diagonal.
LambdaGrid lambda_grid(const Matrix& s);

struct LambdaSelection {
  double lambda = 0.0;
  GlassoSolution solution;
  std::array<double, 10> bic{};
};

/// Grid argmin of BIC(lambda) = -log|Theta| + tr(S Theta) + t*log(p)/p with
/// t the count of nonzero upper-off-diagonal entries. Ties break toward the
/// sparser (larger-lambda) model. Falls back to default_rho when the grid is
/// degenerate.
LambdaSelection select_lambda_bic(const Matrix& s, double default_rho = 0.1);

}  // namespace mnpca
