#pragma once

#include <optional>
#include <vector>

#include "mnpca/types.hpp"

namespace mnpca {

struct PowerIterationStalled : std::runtime_error {
  explicit PowerIterationStalled(const std::string& what)
      : std::runtime_error(what) {}
};

struct MrlConfig {
  int rank = 2;
  std::optional<double> lambda1;  // nullopt -> BIC selection
  std::optional<double> lambda2;
  double epsilon = 1e-6;  // ALS ridge
  double outer_tol = 1e-4;
  double inner_tol = 1e-5;
  int max_outer = 50;
  int max_inner = 30;
  bool update_precisions = true;  // identities held when false
  std::uint64_t seed = 0;
};

struct MnPcaModel {
  Matrix x;  // n x r
  Matrix w;  // p x r
  SparseSymmetric omega_inv;
  SparseSymmetric sigma_inv;
  Matrix omega_inv_dense;
  Matrix sigma_inv_dense;
  std::vector<double> objective_trace;
  MrlConfig hyper;
  double lambda1_used = 0.0;
  double lambda2_used = 0.0;
  bool converged = true;
  bool degenerate_residual = false;  // precision update skipped

  Matrix reconstruction() const { return x * w.transpose(); }
};

/// Eq.-literal evaluation of the penalized negative log-likelihood:
///   0.5 tr[Sigma^-1 (Y-XW^T)^T Omega^-1 (Y-XW^T)]
///   + (p/2) log|Omega| + (n/2) log|Sigma|
///   + n lambda1 ||Omega^-1||_1 + p lambda2 ||Sigma^-1||_1
/// with log|Omega| = -log|Omega^-1| via Cholesky of the precision.
double neg_log_likelihood(const Matrix& y, const Matrix& x, const Matrix& w,
                          const Matrix& omega_inv, const Matrix& sigma_inv,
                          double lambda1, double lambda2);

/// tr[Sigma^-1 (Y-XW^T)^T Omega^-1 (Y-XW^T)]
double mahalanobis_reconstruction_error(const Matrix& y, const Matrix& x,
                                        const Matrix& w,
                                        const Matrix& omega_inv,
                                        const Matrix& sigma_inv);

/// Alternating least squares on X and W with SPD solves; iterates until the
/// relative change of the generalized reconstruction error drops below
/// inner_tol or max_inner passes.
std::pair<Matrix, Matrix> update_factors_als(const Matrix& y, Matrix x,
                                             Matrix w,
                                             const Matrix& omega_inv,
                                             const Matrix& sigma_inv,
                                             double epsilon, double inner_tol,
                                             int max_inner);

struct PrecisionUpdate {
  SparseSymmetric omega_inv;
  SparseSymmetric sigma_inv;
  bool skipped = false;  // degenerate residual, inputs held
};

/// Flip-flop precision refresh: S1 = (1/p) R Sigma^-1 R^T feeds the row
/// glasso, then S2 = (1/n) R^T Omega_new^-1 R feeds the column glasso.
/// The internal glasso penalties are 2n*lambda1/p and 2p*lambda2/n so each
/// half-step is an exact block-descent move on neg_log_likelihood.
PrecisionUpdate update_precisions(const Matrix& y, const Matrix& x,
                                  const Matrix& w,
                                  const SparseSymmetric& omega_inv,
                                  const SparseSymmetric& sigma_inv,
                                  double lambda1, double lambda2);

MnPcaModel fit_mrl(const Matrix& y, const MrlConfig& cfg);

/// Generalized power iteration with deflation in the Sigma^-1 inner
/// product; returns (scores, loadings) with v_k^T Sigma^-1 v_k = 1 and
/// v-columns sign-canonicalized.
std::pair<Matrix, Matrix> gpca_postprocess(const Matrix& y,
                                           const Matrix& omega_inv,
                                           const Matrix& sigma_inv, int r,
                                           double tol = 1e-12,
                                           int max_iter = 5000);

}  // namespace mnpca
