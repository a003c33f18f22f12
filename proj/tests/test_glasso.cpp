#include <algorithm>
#include <random>

#include "doctest.h"
#include "mnpca/glasso.hpp"
#include "mnpca/linalg.hpp"
#include "mnpca/synth.hpp"

using namespace mnpca;

namespace {

Matrix empirical_covariance(const Matrix& samples) {
  Matrix c = samples.transpose() * samples / samples.rows();
  return 0.5 * (c + c.transpose());
}

// Samples from N(0, Theta^-1) via the precision's Cholesky factor.
Matrix sample_gaussian(const Matrix& theta, int n, unsigned seed) {
  const Matrix l = cholesky(theta);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix z(n, theta.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < theta.cols(); ++j) z(i, j) = g(rng);
  return l.transpose()
      .triangularView<Eigen::Upper>()
      .solve(z.transpose())
      .transpose();
}

double kkt_violation(const Matrix& s, double rho, const Matrix& theta) {
  const Matrix w = theta.inverse();
  double worst = 0.0;
  for (int i = 0; i < s.rows(); ++i)
    for (int j = 0; j < s.cols(); ++j) {
      const double g = s(i, j) - w(i, j);
      if (theta(i, j) != 0.0)
        worst = std::max(worst,
                         std::abs(g + rho * (theta(i, j) > 0 ? 1.0 : -1.0)));
      else
        worst = std::max(worst, std::abs(g) - rho);
    }
  return worst;
}

// Brute-force oracle for a 3x3 problem: grid the three off-diagonals,
// optimize the diagonal per grid point by coordinate Newton steps on
// f(theta_ii) = -log det + tr(S Theta) + rho ||Theta||_1.
double objective_with_optimized_diagonal(const Matrix& s, double rho, double a,
                                         double b, double c) {
  Matrix theta(3, 3);
  theta << 1, a, b, a, 1, c, b, c, 1;
  theta.diagonal() =
      Vector::Constant(3, std::abs(a) + std::abs(b) + std::abs(c) + 0.5);
  // coordinate Newton on the diagonal entries
  for (int sweep = 0; sweep < 40; ++sweep) {
    double moved = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Matrix inv = theta.inverse();
      const double grad = s(i, i) + rho - inv(i, i);
      const double hess = inv(i, i) * inv(i, i);
      double delta = -grad / hess;
      // keep PD: damp steps that would break it
      for (int halve = 0; halve < 40; ++halve) {
        Matrix cand = theta;
        cand(i, i) += delta;
        if (Eigen::LLT<Matrix>(cand).info() == Eigen::Success) {
          theta = cand;
          moved = std::max(moved, std::abs(delta));
          break;
        }
        delta *= 0.5;
      }
    }
    if (moved < 1e-12) break;
  }
  if (Eigen::LLT<Matrix>(theta).info() != Eigen::Success)
    return std::numeric_limits<double>::infinity();
  return -std::log(theta.determinant()) + (s.cwiseProduct(theta)).sum() +
         rho * theta.cwiseAbs().sum();
}

// Off-diagonal grid search with the diagonal optimized out at each node;
// a coarse pass locates the basin, a fine pass resolves the value.
double brute_force_objective_3x3(const Matrix& s, double rho, double lo,
                                 double hi, double step) {
  double best = std::numeric_limits<double>::infinity();
  double best_a = 0.0, best_b = 0.0, best_c = 0.0;
  const double coarse = 0.05;
  for (double a = lo; a <= hi + 1e-12; a += coarse)
    for (double b = lo; b <= hi + 1e-12; b += coarse)
      for (double c = lo; c <= hi + 1e-12; c += coarse) {
        const double obj = objective_with_optimized_diagonal(s, rho, a, b, c);
        if (obj < best) {
          best = obj;
          best_a = a;
          best_b = b;
          best_c = c;
        }
      }
  const double window = coarse + step;
  for (double a = best_a - window; a <= best_a + window + 1e-12; a += step)
    for (double b = best_b - window; b <= best_b + window + 1e-12; b += step)
      for (double c = best_c - window; c <= best_c + window + 1e-12;
           c += step) {
        best =
            std::min(best, objective_with_optimized_diagonal(s, rho, a, b, c));
      }
  return best;
}

}  // namespace

TEST_SUITE_BEGIN("glasso");

TEST_CASE("glasso_objective closed forms") {
  Matrix eye = Matrix::Identity(2, 2);
  CHECK(glasso_objective({eye, 0.0}, eye) == doctest::Approx(2.0));
  CHECK(glasso_objective({eye, 0.5}, eye) == doctest::Approx(3.0));
}

TEST_CASE("glasso_objective at the analytic MLE") {
  Matrix s = Matrix::Zero(2, 2);
  s.diagonal() << 2.0, 0.5;
  Matrix theta = Matrix::Zero(2, 2);
  theta.diagonal() << 0.5, 2.0;
  CHECK(glasso_objective({s, 0.0}, theta) == doctest::Approx(2.0));
}

TEST_CASE("diagonal covariance decouples") {
  GlassoSolution sol = solve_glasso({Matrix::Identity(3, 3), 0.1});
  CHECK(sol.theta.nnz_offdiag() == 0);
  for (int i = 0; i < 3; ++i)
    CHECK(sol.theta_dense(i, i) == doctest::Approx(1.0 / 1.1));
}

TEST_CASE("large penalty forces a diagonal estimate") {
  Matrix s(2, 2);
  s << 1.0, 0.9, 0.9, 1.0;
  GlassoSolution sol = solve_glasso({s, 0.9});
  CHECK(sol.theta.nnz_offdiag() == 0);
}

TEST_CASE("tridiagonal support recovery with brute-force objective oracle") {
  Matrix theta_true = Matrix::Identity(3, 3);
  theta_true(0, 1) = theta_true(1, 0) = 0.45;
  theta_true(1, 2) = theta_true(2, 1) = -0.4;
  const Matrix s = empirical_covariance(sample_gaussian(theta_true, 200, 77));

  GlassoSolution sol = solve_glasso({s, 0.05});
  CHECK(sol.theta_dense(0, 1) != 0.0);
  CHECK(sol.theta_dense(1, 2) != 0.0);
  CHECK(sol.theta_dense(0, 2) == 0.0);

  const double oracle =
      brute_force_objective_3x3(s, 0.05, -1.0, 1.0, 1e-2);
  CHECK(sol.objective <= oracle + 1e-3);
  CHECK(sol.objective >= oracle - 1e-2);
}

TEST_CASE("KKT certificate on random problems") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 4 + static_cast<int>(rng() % 10);
    Matrix theta = gen_sparse_spd(dim, 0.2, 8.0, rng()).dense();
    const Matrix s =
        empirical_covariance(sample_gaussian(theta, 20 * dim, rng()));
    const double rho = 0.02 + 0.1 * (trial % 5);
    GlassoSolution sol = solve_glasso({s, rho});
    CHECK(sol.converged);
    CHECK(kkt_violation(s, rho, sol.theta_dense) < 1e-4);
  }
}

TEST_CASE("monotone screening") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix theta = gen_sparse_spd(12, 0.2, 6.0, rng()).dense();
    const Matrix s = empirical_covariance(sample_gaussian(theta, 400, rng()));
    const double rho2 = 0.05, rho1 = 0.15;
    GlassoSolution strong = solve_glasso({s, rho1});
    // support at the stronger penalty must lie inside the screened graph of
    // the weaker one
    for (const auto& e : strong.theta.offdiag)
      CHECK(std::abs(s(e.i, e.j)) > rho2);
  }
}

TEST_CASE("block equivalence for block-diagonal screened graphs") {
  std::mt19937_64 rng(31);
  Matrix a = gen_sparse_spd(3, 0.5, 4.0, rng()).dense();
  Matrix b = gen_sparse_spd(3, 0.5, 4.0, rng()).dense();
  Matrix s = Matrix::Zero(6, 6);
  s.topLeftCorner(3, 3) = a.inverse();
  s.bottomRightCorner(3, 3) = b.inverse();
  const double rho = 0.01;

  GlassoSolution joint = solve_glasso({s, rho});
  GlassoSolution sa = solve_glasso({s.topLeftCorner(3, 3), rho});
  GlassoSolution sb = solve_glasso({s.bottomRightCorner(3, 3), rho});
  Matrix assembled = Matrix::Zero(6, 6);
  assembled.topLeftCorner(3, 3) = sa.theta_dense;
  assembled.bottomRightCorner(3, 3) = sb.theta_dense;
  CHECK((joint.theta_dense - assembled).norm() < 1e-6);
}

TEST_CASE("connected components") {
  Matrix s = Matrix::Identity(4, 4);
  s(0, 1) = s(1, 0) = 0.05;
  CHECK(connected_components(s, 0.1).size() == 4);

  Matrix two = Matrix::Identity(6, 6);
  two(0, 1) = two(1, 0) = 0.5;
  two(1, 2) = two(2, 1) = 0.5;
  two(3, 4) = two(4, 3) = 0.5;
  two(4, 5) = two(5, 4) = 0.5;
  CHECK(connected_components(two, 0.1).size() == 2);

  std::mt19937_64 rng(2);
  Matrix r = gen_sparse_spd(5, 1.0, 4.0, rng()).dense();
  CHECK(connected_components(r, 0.0).size() == 1);
}

TEST_CASE("lambda_grid") {
  Matrix s = Matrix::Identity(3, 3);
  s(0, 2) = s(2, 0) = 0.8;
  s(0, 1) = s(1, 0) = 0.3;
  LambdaGrid grid = lambda_grid(s);
  CHECK(grid.values.front() == doctest::Approx(0.08));
  CHECK(grid.values.back() == doctest::Approx(0.8));
  const double ratio = std::pow(10.0, 1.0 / 9.0);
  for (int i = 1; i < 10; ++i)
    CHECK(grid.values[i] / grid.values[i - 1] == doctest::Approx(ratio));

  CHECK_THROWS_AS(lambda_grid(Matrix::Identity(3, 3)),
                  DegenerateCovarianceError);
}

TEST_CASE("select_lambda_bic degenerate fallback") {
  LambdaSelection sel = select_lambda_bic(Matrix::Identity(4, 4), 0.1);
  CHECK(sel.lambda == doctest::Approx(0.1));
  CHECK(sel.solution.theta.nnz_offdiag() == 0);
}

TEST_CASE("select_lambda_bic is the grid argmin and recovers sparsity") {
  std::mt19937_64 rng(555);
  Matrix theta = gen_sparse_spd(20, 0.1, 8.0, rng()).dense();
  const Matrix s = empirical_covariance(sample_gaussian(theta, 300, 4242));
  LambdaSelection sel = select_lambda_bic(s);

  LambdaGrid grid = lambda_grid(s);
  double min_bic = *std::min_element(sel.bic.begin(), sel.bic.end());
  int chosen = -1;
  for (int i = 0; i < 10; ++i)
    if (grid.values[i] == sel.lambda) chosen = i;
  REQUIRE(chosen >= 0);
  CHECK(sel.bic[chosen] == doctest::Approx(min_bic));

  // TNR against the true support
  long tn = 0, negatives = 0;
  for (int i = 0; i < 20; ++i)
    for (int j = i + 1; j < 20; ++j) {
      if (theta(i, j) != 0.0) continue;
      ++negatives;
      if (sel.solution.theta_dense(i, j) == 0.0) ++tn;
    }
  CHECK(static_cast<double>(tn) / negatives > 0.9);
}

TEST_CASE("objective nonincreasing across penalized refits") {
  // glasso objective at the solution is below the diagonal start
  std::mt19937_64 rng(77);
  Matrix theta = gen_sparse_spd(10, 0.3, 5.0, rng()).dense();
  const Matrix s = empirical_covariance(sample_gaussian(theta, 500, 7));
  const double rho = 0.05;
  Matrix diag_start = Matrix::Zero(10, 10);
  for (int i = 0; i < 10; ++i) diag_start(i, i) = 1.0 / (s(i, i) + rho);
  GlassoSolution sol = solve_glasso({s, rho});
  CHECK(sol.objective <= glasso_objective({s, rho}, diag_start) + 1e-10);
}

TEST_SUITE_END();
