#include "mnpca/mrl.hpp"

#include <cmath>

#include "mnpca/glasso.hpp"
#include "mnpca/linalg.hpp"

namespace mnpca {

namespace {

double log_det_spd(const Matrix& a) {
  const Matrix l = cholesky(a);
  double ld = 0.0;
  for (int i = 0; i < l.rows(); ++i) ld += std::log(l(i, i));
  return 2.0 * ld;
}

double l1_norm(const Matrix& a) { return a.cwiseAbs().sum(); }

}  // namespace

double mahalanobis_reconstruction_error(const Matrix& y, const Matrix& x,
                                        const Matrix& w,
                                        const Matrix& omega_inv,
                                        const Matrix& sigma_inv) {
  if (x.rows() != y.rows() || w.rows() != y.cols() || x.cols() != w.cols())
    throw ShapeError("mahalanobis_reconstruction_error: shape mismatch");
  const Matrix r = y - x * w.transpose();
  return (sigma_inv * r.transpose() * omega_inv * r).trace();
}

double neg_log_likelihood(const Matrix& y, const Matrix& x, const Matrix& w,
                          const Matrix& omega_inv, const Matrix& sigma_inv,
                          double lambda1, double lambda2) {
  const double n = static_cast<double>(y.rows());
  const double p = static_cast<double>(y.cols());
  const double fit =
      0.5 * mahalanobis_reconstruction_error(y, x, w, omega_inv, sigma_inv);
  // log|Omega| = -log|Omega^-1|
  return fit - 0.5 * p * log_det_spd(omega_inv) -
         0.5 * n * log_det_spd(sigma_inv) + n * lambda1 * l1_norm(omega_inv) +
         p * lambda2 * l1_norm(sigma_inv);
}

std::pair<Matrix, Matrix> update_factors_als(const Matrix& y, Matrix x,
                                             Matrix w,
                                             const Matrix& omega_inv,
                                             const Matrix& sigma_inv,
                                             double epsilon, double inner_tol,
                                             int max_inner) {
  const int r = static_cast<int>(x.cols());
  const Matrix eye = Matrix::Identity(r, r);
  double prev = mahalanobis_reconstruction_error(y, x, w, omega_inv, sigma_inv);
  for (int it = 0; it < max_inner; ++it) {
    const Matrix sw = sigma_inv * w;
    x = solve_spd(w.transpose() * sw + epsilon * eye, (y * sw).transpose())
            .transpose();
    const Matrix ox = omega_inv * x;
    w = solve_spd(x.transpose() * ox + epsilon * eye,
                  (y.transpose() * ox).transpose())
            .transpose();
    const double cur =
        mahalanobis_reconstruction_error(y, x, w, omega_inv, sigma_inv);
    if (std::abs(prev - cur) <= inner_tol * std::max(1.0, std::abs(prev)))
      break;
    prev = cur;
  }
  return {std::move(x), std::move(w)};
}

PrecisionUpdate update_precisions(const Matrix& y, const Matrix& x,
                                  const Matrix& w,
                                  const SparseSymmetric& omega_inv,
                                  const SparseSymmetric& sigma_inv,
                                  double lambda1, double lambda2) {
  const int n = static_cast<int>(y.rows());
  const int p = static_cast<int>(y.cols());
  const Matrix resid = y - x * w.transpose();

  PrecisionUpdate out;
  if (resid.norm() < 1e-12 * std::max(1.0, y.norm())) {
    out.omega_inv = omega_inv;
    out.sigma_inv = sigma_inv;
    out.skipped = true;
    return out;
  }

  const double rho1 = 2.0 * n * lambda1 / p;
  const double rho2 = 2.0 * p * lambda2 / n;
  const double jitter = 1e-8;

  Matrix s1 = resid * sigma_inv.dense() * resid.transpose() / p;
  s1 = 0.5 * (s1 + s1.transpose());
  s1.diagonal().array() += jitter;
  GlassoSolution omg = solve_glasso({s1, rho1, omega_inv.dense()});
  out.omega_inv = omg.theta;

  Matrix s2 = resid.transpose() * omg.theta_dense * resid / n;
  s2 = 0.5 * (s2 + s2.transpose());
  s2.diagonal().array() += jitter;
  GlassoSolution sig = solve_glasso({s2, rho2, sigma_inv.dense()});
  out.sigma_inv = sig.theta;
  return out;
}

MnPcaModel fit_mrl(const Matrix& y, const MrlConfig& cfg) {
  require_finite(y, "fit_mrl input");
  const int n = static_cast<int>(y.rows());
  const int p = static_cast<int>(y.cols());
  if (cfg.rank < 1 || cfg.rank > std::min(n, p))
    throw RankTooLargeError("fit_mrl: rank out of range");

  const TruncatedSvd init = truncated_svd(y, cfg.rank);

  // BIC selection at initialization (identity precisions, SVD factors).
  // Skipped entirely when the precisions are frozen: the penalty then only
  // shifts the objective by a constant.
  double lambda1 = cfg.lambda1.value_or(0.0);
  double lambda2 = cfg.lambda2.value_or(0.0);
  if (cfg.update_precisions && (!cfg.lambda1 || !cfg.lambda2)) {
    const Matrix resid0 = y - init.u * init.s.asDiagonal() * init.v.transpose();
    if (!cfg.lambda1) {
      Matrix s1 = resid0 * resid0.transpose() / p;
      s1 = 0.5 * (s1 + s1.transpose());
      lambda1 = select_lambda_bic(s1).lambda * p / (2.0 * n);
    }
    if (!cfg.lambda2) {
      Matrix s2 = resid0.transpose() * resid0 / n;
      s2 = 0.5 * (s2 + s2.transpose());
      lambda2 = select_lambda_bic(s2).lambda * n / (2.0 * p);
    }
  }

  auto run = [&](Matrix x0, Matrix w0) {
    MnPcaModel m;
    m.hyper = cfg;
    m.lambda1_used = lambda1;
    m.lambda2_used = lambda2;
    m.x = std::move(x0);
    m.w = std::move(w0);
    m.omega_inv = SparseSymmetric::identity(n);
    m.sigma_inv = SparseSymmetric::identity(p);
    m.omega_inv_dense = Matrix::Identity(n, n);
    m.sigma_inv_dense = Matrix::Identity(p, p);

    auto objective = [&] {
      return neg_log_likelihood(y, m.x, m.w, m.omega_inv_dense,
                                m.sigma_inv_dense, m.lambda1_used,
                                m.lambda2_used);
    };

    m.objective_trace.push_back(objective());
    m.converged = false;
    for (int outer = 0; outer < cfg.max_outer; ++outer) {
      if (cfg.update_precisions) {
        PrecisionUpdate upd =
            update_precisions(y, m.x, m.w, m.omega_inv, m.sigma_inv,
                              m.lambda1_used, m.lambda2_used);
        m.degenerate_residual = m.degenerate_residual || upd.skipped;
        m.omega_inv = std::move(upd.omega_inv);
        m.sigma_inv = std::move(upd.sigma_inv);
        m.omega_inv_dense = m.omega_inv.dense();
        m.sigma_inv_dense = m.sigma_inv.dense();
      }
      std::tie(m.x, m.w) =
          update_factors_als(y, m.x, m.w, m.omega_inv_dense, m.sigma_inv_dense,
                             cfg.epsilon, cfg.inner_tol, cfg.max_inner);
      const double obj = objective();
      const double prev = m.objective_trace.back();
      m.objective_trace.push_back(obj);
      if (std::abs(prev - obj) <=
          cfg.outer_tol * std::max(1.0, std::abs(prev))) {
        m.converged = true;
        break;
      }
    }
    return m;
  };

  MnPcaModel best = run(init.u * init.s.asDiagonal(), init.v);
  if (!cfg.update_precisions) return best;

  // The alternation is only locally convergent: when a strong noise
  // direction leaks into the SVD factors it is also missing from the
  // residual, so the estimated precisions never learn to shrink it and the
  // factor step keeps it. A second start from a median-clamped whitening
  // of the raw covariances puts such directions back in the residual;
  // the penalized likelihood decides which basin wins.
  const Matrix q = clamped_inverse_sqrt(y * y.transpose() / double(p));
  const Matrix r = clamped_inverse_sqrt(y.transpose() * y / double(n));
  const TruncatedSvd ws = truncated_svd(q * y * r, cfg.rank);
  MnPcaModel alt =
      run(solve_spd(q, ws.u * ws.s.asDiagonal()), solve_spd(r, ws.v));
  return alt.objective_trace.back() < best.objective_trace.back()
             ? std::move(alt)
             : std::move(best);
}

std::pair<Matrix, Matrix> gpca_postprocess(const Matrix& y,
                                           const Matrix& omega_inv,
                                           const Matrix& sigma_inv, int r,
                                           double tol, int max_iter) {
  const int n = static_cast<int>(y.rows());
  const int p = static_cast<int>(y.cols());
  if (r < 1 || r > std::min(n, p))
    throw RankTooLargeError("gpca_postprocess: rank out of range");

  const Matrix yt_oy = y.transpose() * omega_inv * y;  // p x p
  auto b_norm = [&](const Vector& v) {
    return std::sqrt(v.dot(sigma_inv * v));
  };

  Matrix loadings(p, r);
  Matrix scores(n, r);
  TruncatedSvd warm = truncated_svd(y, r);

  for (int k = 0; k < r; ++k) {
    Vector v = warm.v.col(k);
    // Sigma^-1-orthogonal deflation against earlier columns.
    auto deflate = [&](Vector& u) {
      for (int kk = 0; kk < k; ++kk)
        u -= loadings.col(kk) * (loadings.col(kk).dot(sigma_inv * u));
    };
    deflate(v);
    double nv = b_norm(v);
    if (nv < 1e-14) v = Vector::Random(p);
    v /= b_norm(v);

    double rq_prev = 0.0;
    bool done = false;
    for (int it = 0; it < max_iter; ++it) {
      Vector next = yt_oy * (sigma_inv * v);  // B^-1 A v
      deflate(next);
      const double nn = b_norm(next);
      if (nn < 1e-300)
        throw PowerIterationStalled("gpca_postprocess: vanishing iterate");
      next /= nn;
      const Vector sv = sigma_inv * next;
      const double rq = sv.dot(yt_oy * sv);
      v = next;
      if (it > 0 && std::abs(rq - rq_prev) <= tol * std::max(1.0, rq)) {
        done = true;
        break;
      }
      rq_prev = rq;
    }
    if (!done)
      throw PowerIterationStalled("gpca_postprocess: no convergence");

    int idx = 0;
    v.cwiseAbs().maxCoeff(&idx);
    if (v(idx) < 0.0) v = -v;
    loadings.col(k) = v;

    Vector u = y * (sigma_inv * v);
    const double nu = std::sqrt(u.dot(omega_inv * u));
    if (nu > 0.0) u /= nu;
    scores.col(k) = u;
  }
  return {scores, loadings};
}

}  // namespace mnpca
