#include "mnpca/glasso.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "mnpca/linalg.hpp"

namespace mnpca {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double log_det_from_llt(const Eigen::LLT<Matrix>& llt) {
  double ld = 0.0;
  const auto& L = llt.matrixLLT();
  for (int i = 0; i < L.rows(); ++i) ld += std::log(L(i, i));
  return 2.0 * ld;
}

// -log det(Theta) + tr(S Theta) + rho ||Theta||_1 (diagonal included).
double penalized_objective(const Matrix& s, double rho, const Matrix& theta,
                           const Eigen::LLT<Matrix>& llt) {
  return -log_det_from_llt(llt) + (s.cwiseProduct(theta)).sum() +
         rho * theta.cwiseAbs().sum();
}

// Max violation of the stationarity conditions of the penalized problem.
double kkt_residual(const Matrix& s, double rho, const Matrix& theta,
                    const Matrix& theta_inv) {
  double worst = 0.0;
  for (int i = 0; i < s.rows(); ++i) {
    for (int j = 0; j < s.cols(); ++j) {
      const double g = s(i, j) - theta_inv(i, j);
      double v;
      if (theta(i, j) != 0.0)
        v = std::abs(g + rho * (theta(i, j) > 0 ? 1.0 : -1.0));
      else
        v = std::max(0.0, std::abs(g) - rho);
      worst = std::max(worst, v);
    }
  }
  return worst;
}

struct BlockResult {
  Matrix theta;
  int iterations = 0;
  double kkt = 0.0;
  bool converged = true;
};

// Proximal gradient with Barzilai-Borwein spectral steps; the line search
// rejects non-PD iterates via Cholesky and enforces the majorization bound,
// so the penalized objective is nonincreasing from the starting point.
BlockResult solve_block(const Matrix& s, double rho, double tol, int max_iter,
                        const Matrix& init) {
  const int d = static_cast<int>(s.rows());
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  const double kkt_tol = std::max(tol, 1e-8) * scale;

  Matrix theta;
  Eigen::LLT<Matrix> llt;
  if (init.size() > 0) {
    theta = 0.5 * (init + init.transpose());
    llt.compute(theta);
  }
  if (init.size() == 0 || llt.info() != Eigen::Success) {
    theta = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) theta(i, i) = 1.0 / (s(i, i) + rho + 1e-12);
    llt.compute(theta);
  }
  double obj = penalized_objective(s, rho, theta, llt);
  Matrix theta_inv = llt.solve(Matrix::Identity(d, d));
  Matrix grad = s - theta_inv;

  BlockResult out;
  Matrix prev_theta, prev_grad;
  bool have_prev = false;
  double step = 1.0 / scale;
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    out.kkt = kkt_residual(s, rho, theta, theta_inv);
    if (out.kkt <= kkt_tol) {
      out.theta = theta;
      return out;
    }

    if (have_prev) {
      const Matrix dtheta = theta - prev_theta;
      const Matrix dgrad = grad - prev_grad;
      const double denom = dtheta.cwiseProduct(dgrad).sum();
      if (denom > 0.0)
        step = std::clamp(dtheta.squaredNorm() / denom, 1e-12, 1e8);
      else
        step *= 4.0;
    } else {
      step *= 4.0;  // allow the step to grow back after past backtracks
    }
    const double smooth = obj - rho * theta.cwiseAbs().sum();

    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Matrix cand = theta - step * grad;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          cand(i, j) = soft_threshold(cand(i, j), step * rho);
      cand = 0.5 * (cand + cand.transpose());

      Eigen::LLT<Matrix> cand_llt(cand);
      if (cand_llt.info() == Eigen::Success) {
        const Matrix delta = cand - theta;
        const double cand_obj = penalized_objective(s, rho, cand, cand_llt);
        const double cand_smooth = cand_obj - rho * cand.cwiseAbs().sum();
        const double quad = smooth + grad.cwiseProduct(delta).sum() +
                            delta.squaredNorm() / (2.0 * step);
        if (cand_smooth <= quad + 1e-12 * std::abs(quad)) {
          prev_theta = theta;
          prev_grad = grad;
          have_prev = true;
          theta = cand;
          llt = cand_llt;
          obj = cand_obj;
          theta_inv = llt.solve(Matrix::Identity(d, d));
          grad = s - theta_inv;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow; return best iterate
  }
  out.kkt = kkt_residual(s, rho, theta, theta_inv);
  out.converged = out.kkt <= kkt_tol;
  out.theta = theta;
  return out;
}

}  // namespace

double glasso_objective(const GlassoProblem& p, const Matrix& theta) {
  require_symmetric(p.s, "glasso covariance");
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefiniteError("glasso_objective: theta not PD");
  return penalized_objective(p.s, p.rho, theta, llt);
}

std::vector<std::vector<int>> connected_components(const Matrix& s,
                                                   double rho) {
  const int p = static_cast<int>(s.rows());
  std::vector<int> parent(p);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (std::abs(s(i, j)) > rho) parent[find(i)] = find(j);

  std::vector<std::vector<int>> blocks(p);
  for (int i = 0; i < p; ++i) blocks[find(i)].push_back(i);
  std::erase_if(blocks, [](const auto& b) { return b.empty(); });
  return blocks;
}

GlassoSolution solve_glasso(const GlassoProblem& p, double tol, int max_iter) {
  require_finite(p.s, "glasso covariance");
  require_symmetric(p.s, "glasso covariance");
  if (p.rho < 0.0) throw std::invalid_argument("glasso: rho must be >= 0");
  const int dim = static_cast<int>(p.s.rows());

  GlassoSolution sol;
  sol.theta_dense = Matrix::Zero(dim, dim);

  for (const auto& block : connected_components(p.s, p.rho)) {
    if (block.size() == 1) {
      const int i = block[0];
      const double denom = p.s(i, i) + p.rho;
      if (denom <= 0.0)
        throw NotPositiveDefiniteError("glasso: nonpositive diagonal");
      sol.theta_dense(i, i) = 1.0 / denom;
      sol.iterations = std::max(sol.iterations, 1);
      continue;
    }
    Matrix sub(block.size(), block.size());
    for (std::size_t a = 0; a < block.size(); ++a)
      for (std::size_t b = 0; b < block.size(); ++b)
        sub(a, b) = p.s(block[a], block[b]);
    Matrix sub_init;
    if (p.init.rows() == dim && p.init.cols() == dim) {
      sub_init.resize(block.size(), block.size());
      for (std::size_t a = 0; a < block.size(); ++a)
        for (std::size_t b = 0; b < block.size(); ++b)
          sub_init(a, b) = p.init(block[a], block[b]);
    }
    BlockResult res = solve_block(sub, p.rho, tol, max_iter, sub_init);
    for (std::size_t a = 0; a < block.size(); ++a)
      for (std::size_t b = 0; b < block.size(); ++b)
        sol.theta_dense(block[a], block[b]) = res.theta(a, b);
    sol.iterations = std::max(sol.iterations, res.iterations);
    sol.kkt_residual = std::max(sol.kkt_residual, res.kkt);
    sol.converged = sol.converged && res.converged;
  }

  sol.theta = SparseSymmetric::from_dense(sol.theta_dense);
  sol.objective = glasso_objective(p, sol.theta_dense);
  return sol;
}

LambdaGrid lambda_grid(const Matrix& s) {
  require_symmetric(s, "lambda_grid covariance");
  double lmax = 0.0;
  for (int i = 0; i < s.rows(); ++i)
    for (int j = i + 1; j < s.cols(); ++j)
      lmax = std::max(lmax, std::abs(s(i, j)));
  if (lmax == 0.0)
    throw DegenerateCovarianceError(
        "lambda_grid: all off-diagonal entries are zero");
  LambdaGrid grid;
  const double lmin = 0.1 * lmax;
  for (int i = 0; i < 10; ++i)
    grid.values[i] = lmin * std::pow(lmax / lmin, i / 9.0);
  return grid;
}

LambdaSelection select_lambda_bic(const Matrix& s, double default_rho) {
  const int p = static_cast<int>(s.rows());
  LambdaSelection sel;
  LambdaGrid grid;
  try {
    grid = lambda_grid(s);
  } catch (const DegenerateCovarianceError&) {
    sel.lambda = default_rho;
    sel.solution = solve_glasso({s, default_rho, {}});
    sel.bic.fill(std::numeric_limits<double>::quiet_NaN());
    return sel;
  }

  double best_bic = std::numeric_limits<double>::infinity();
  // Sweep from the sparse end so ties keep the larger lambda.
  for (int i = 9; i >= 0; --i) {
    const double lam = grid.values[i];
    GlassoSolution cand = solve_glasso({s, lam, {}});
    const double t = static_cast<double>(cand.theta.nnz_offdiag());
    Eigen::LLT<Matrix> llt(cand.theta_dense);
    const double bic = -log_det_from_llt(llt) +
                       (s.cwiseProduct(cand.theta_dense)).sum() +
                       t * std::log(static_cast<double>(p)) / p;
    sel.bic[i] = bic;
    if (bic < best_bic) {
      best_bic = bic;
      sel.lambda = lam;
      sel.solution = std::move(cand);
    }
  }
  return sel;
}

}  // namespace mnpca
