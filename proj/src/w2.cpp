#include "mnpca/w2.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "mnpca/linalg.hpp"

namespace mnpca {

namespace {

Matrix sign_matrix(const Matrix& a) {
  return a.unaryExpr([](double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return 0.0;
  });
}

double mean_singular_value(const Matrix& a) {
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues().mean();
}

// Floors singular values at floor_frac * mean; returns the conditioning.
double enforce_invertibility(Matrix& a, double floor_frac) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vector s = svd.singularValues();
  const double floor = floor_frac * s.mean();
  bool clamped = false;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) < floor) {
      s(i) = floor;
      clamped = true;
    }
  if (clamped) a = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
  return s(0) / s(s.size() - 1);
}

// Largest-to-median eigenvalue ratio of the two residual covariances. For
// IID noise this stays within the sampling spread of a Wishart bulk
// (roughly 4 at these aspect ratios, under 10 for mildly graphical
// noise); strongly graphical noise pushes it far beyond that.
double residual_anisotropy(const Matrix& e) {
  const double n = static_cast<double>(e.rows());
  const double p = static_cast<double>(e.cols());
  double stat = 0.0;
  for (const Matrix& cov :
       {Matrix(e * e.transpose() / p), Matrix(e.transpose() * e / n)}) {
    const Vector w = sym_eig(cov).values;
    const double med = positive_median(w);
    if (med > 0.0) stat = std::max(stat, w(0) / med);
  }
  return stat;
}

}  // namespace

double gaussian_w2_squared(const Vector& m1, const Matrix& c1,
                           const Vector& m2, const Matrix& c2) {
  if (m1.size() != m2.size() || c1.rows() != m1.size() ||
      c2.rows() != m2.size())
    throw ShapeError("gaussian_w2_squared: shape mismatch");
  cholesky(c1);  // SPD validation
  cholesky(c2);
  const Matrix c2h = sym_sqrt(c2);
  const Matrix cross = sym_sqrt(c2h * c1 * c2h);
  return (m1 - m2).squaredNorm() + c1.trace() + c2.trace() -
         2.0 * cross.trace();
}

double w2_objective(const Matrix& e, const W2Transforms& t,
                    const W2Config& cfg) {
  const double np = static_cast<double>(e.rows()) * e.cols();
  const Matrix qer = t.q * e * t.r;
  Eigen::BDCSVD<Matrix> svd(qer);
  const double value =
      qer.squaredNorm() / std::sqrt(np) -
      2.0 * cfg.sigma_noise / std::pow(np, 0.25) * svd.singularValues().sum() +
      cfg.lambda1 * (t.q.transpose() * t.q).cwiseAbs().sum() +
      cfg.lambda2 * (t.r.transpose() * t.r).cwiseAbs().sum();
  if (!std::isfinite(value)) throw NonFiniteError("w2_objective: non-finite");
  return value;
}

std::pair<Matrix, Matrix> w2_gradient(const Matrix& e, const W2Transforms& t,
                                      const W2Config& cfg) {
  const double np = static_cast<double>(e.rows()) * e.cols();
  const Matrix er = e * t.r;
  const Matrix qe = t.q * e;
  const Matrix qer = t.q * er;

  Eigen::BDCSVD<Matrix> svd(qer, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix uvt = svd.matrixU() * svd.matrixV().transpose();

  const double frob_c = 2.0 / std::sqrt(np);
  const double nuc_c = 2.0 * cfg.sigma_noise / std::pow(np, 0.25);

  Matrix gq = frob_c * qer * er.transpose() - nuc_c * uvt * er.transpose() +
              2.0 * cfg.lambda1 * t.q * sign_matrix(t.q.transpose() * t.q);
  Matrix gr = frob_c * qe.transpose() * qer - nuc_c * qe.transpose() * uvt +
              2.0 * cfg.lambda2 * t.r * sign_matrix(t.r.transpose() * t.r);
  if (!gq.allFinite() || !gr.allFinite())
    throw NonFiniteError("w2_gradient: non-finite");
  return {std::move(gq), std::move(gr)};
}

W2Transforms balance_transforms(W2Transforms t) {
  const double avg_q = mean_singular_value(t.q);
  const double avg_r = mean_singular_value(t.r);
  const double c = std::sqrt(avg_r / avg_q);
  t.q *= c;
  t.r /= c;
  t.balance_log.emplace_back(avg_q * c, avg_r / c);
  return t;
}

W2Model fit_w2(const Matrix& y, const W2Config& cfg) {
  require_finite(y, "fit_w2 input");
  const int n = static_cast<int>(y.rows());
  const int p = static_cast<int>(y.cols());
  if (cfg.rank < 1 || cfg.rank > std::min(n, p))
    throw RankTooLargeError("fit_w2: rank out of range");

  W2Model m;
  // When the post-PCA residual still shows anisotropy far beyond sampling
  // spread, the data is noise-dominated and the PCA subspace cannot be
  // trusted, so the whitening starts from the raw data covariances;
  // otherwise the residual covariances are the cleaner noise estimate.
  const Matrix resid0 = y - truncated_svd(y, cfg.rank).reconstruction();
  const Matrix& base = residual_anisotropy(resid0) > 14.0 ? y : resid0;
  m.transforms.q = clamped_inverse_sqrt(base * base.transpose() / double(p));
  m.transforms.r = clamped_inverse_sqrt(base.transpose() * base / double(n));
  m.transforms = balance_transforms(std::move(m.transforms));
  m.transforms.balance_log.clear();
  m.transforms.sigma_noise = cfg.sigma_noise;
  m.converged = false;

  // The objective is exactly equivariant under sigma: scaling Q and R by
  // sqrt(sigma) and the step size by 1/sigma maps the sigma=1 descent
  // trajectory onto the sigma one. Seeding that way keeps the fitted
  // whitening direction independent of the noise scale.
  if (!(cfg.sigma_noise > 0.0))
    throw std::invalid_argument("fit_w2: sigma_noise must be positive");
  m.transforms.q *= std::sqrt(cfg.sigma_noise);
  m.transforms.r *= std::sqrt(cfg.sigma_noise);

  auto residual = [&](const TruncatedSvd& svd) {
    // E = Y - Q^-1 L R^-1 via LU solves, never explicit inverses.
    const Matrix l = svd.reconstruction();
    const Matrix a = m.transforms.q.partialPivLu().solve(l);
    const Matrix b = m.transforms.r.transpose()
                         .partialPivLu()
                         .solve(a.transpose())
                         .transpose();
    return (y - b).eval();
  };

  double step_q = cfg.step_size / cfg.sigma_noise;
  double step_r = cfg.step_size / cfg.sigma_noise;
  TruncatedSvd low_rank = truncated_svd(y, cfg.rank);
  Matrix e = residual(low_rank);
  m.objective_trace.push_back(w2_objective(e, m.transforms, cfg));

  for (int outer = 0; outer < cfg.max_iter; ++outer) {
    low_rank =
        truncated_svd(m.transforms.q * y * m.transforms.r, cfg.rank);
    e = residual(low_rank);

    double obj = w2_objective(e, m.transforms, cfg);
    for (int gs = 0; gs < cfg.grad_steps; ++gs) {
      const auto [gq, gr] = w2_gradient(e, m.transforms, cfg);

      W2Transforms cand = m.transforms;
      cand.q -= step_q * gq;
      double cand_obj;
      try {
        cand_obj = w2_objective(e, cand, cfg);
      } catch (const NonFiniteError&) {
        cand_obj = std::numeric_limits<double>::infinity();
      }
      if (cand_obj < obj) {
        m.transforms.q = cand.q;
        obj = cand_obj;
        step_q *= 1.2;
      } else {
        step_q *= 0.5;
      }

      cand = m.transforms;
      cand.r -= step_r * gr;
      try {
        cand_obj = w2_objective(e, cand, cfg);
      } catch (const NonFiniteError&) {
        cand_obj = std::numeric_limits<double>::infinity();
      }
      if (cand_obj < obj) {
        m.transforms.r = cand.r;
        obj = cand_obj;
        step_r *= 1.2;
      } else {
        step_r *= 0.5;
      }
    }

    const double cond_q = enforce_invertibility(m.transforms.q, 1e-6);
    const double cond_r = enforce_invertibility(m.transforms.r, 1e-6);
    m.transforms = balance_transforms(std::move(m.transforms));

    const double obj_now = w2_objective(e, m.transforms, cfg);
    const double prev = m.objective_trace.back();
    m.objective_trace.push_back(obj_now);

    if (cond_q > 1e8 || cond_r > 1e8) break;  // abort with best iterate
    if (std::abs(prev - obj_now) <=
        cfg.tol * std::max(1.0, std::abs(prev))) {
      m.converged = true;
      break;
    }
  }

  // Map the last low-rank factors back through Q^-1 and R^-1.
  low_rank = truncated_svd(m.transforms.q * y * m.transforms.r, cfg.rank);
  m.x = m.transforms.q.partialPivLu().solve(
      (low_rank.u * low_rank.s.asDiagonal()).eval());
  const Matrix rt = m.transforms.r.transpose();
  m.w = rt.partialPivLu().solve(low_rank.v);

  m.omega_inv_dense = m.transforms.q.transpose() * m.transforms.q;
  m.sigma_inv_dense = m.transforms.r.transpose() * m.transforms.r;
  m.omega_inv = SparseSymmetric::from_dense(m.omega_inv_dense, 1e-8);
  m.sigma_inv = SparseSymmetric::from_dense(m.sigma_inv_dense, 1e-8);
  return m;
}

}  // namespace mnpca
