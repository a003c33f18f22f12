#pragma once

#include <utility>
#include <vector>

#include "mnpca/types.hpp"

namespace mnpca {

struct IllConditionedTransformError : std::runtime_error {
  explicit IllConditionedTransformError(const std::string& what)
      : std::runtime_error(what) {}
};

struct W2Config {
  int rank = 2;
  double lambda1 = 0.05;
  double lambda2 = 0.05;
  double sigma_noise = 1.0;
  double step_size = 1e-2;  // initial; adapted per parameter with decay
  int grad_steps = 20;      // gradient steps per outer iteration
  int max_iter = 50;        // outer iterations
  double tol = 1e-5;
  std::uint64_t seed = 0;
};

struct W2Transforms {
  Matrix q;  // n x n
  Matrix r;  // p x p
  double sigma_noise = 1.0;
  std::vector<std::pair<double, double>> balance_log;  // (avg_sv_q, avg_sv_r)
};

/// Closed-form squared 2-Wasserstein distance between Gaussians:
/// ||m1-m2||^2 + tr(c1 + c2 - 2 (c2^{1/2} c1 c2^{1/2})^{1/2}).
double gaussian_w2_squared(const Vector& m1, const Matrix& c1,
                           const Vector& m2, const Matrix& c2);

/// (1/sqrt(np)) ||QER||_F^2 - (2 sigma / (np)^{1/4}) ||QER||_*
///   + lambda1 ||Q^T Q||_1 + lambda2 ||R^T R||_1
double w2_objective(const Matrix& e, const W2Transforms& t,
                    const W2Config& cfg);

/// Analytic gradients of w2_objective with respect to Q and R. The nuclear
/// term uses the U V^T subgradient from a thin SVD of QER.
std::pair<Matrix, Matrix> w2_gradient(const Matrix& e, const W2Transforms& t,
                                      const W2Config& cfg);

/// Rescale Q <- cQ, R <- R/c so the mean singular values match; QER is
/// unchanged.
W2Transforms balance_transforms(W2Transforms t);

struct W2Model {
  Matrix x;  // n x r
  Matrix w;  // p x r
  W2Transforms transforms;
  SparseSymmetric omega_inv;  // Q^T Q, entries below 1e-8 dropped
  SparseSymmetric sigma_inv;  // R^T R
  Matrix omega_inv_dense;
  Matrix sigma_inv_dense;
  std::vector<double> objective_trace;
  bool converged = true;

  Matrix reconstruction() const { return x * w.transpose(); }
};

W2Model fit_w2(const Matrix& y, const W2Config& cfg);

}  // namespace mnpca
