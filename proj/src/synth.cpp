#include "mnpca/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mnpca/linalg.hpp"

namespace mnpca {

namespace {

std::vector<std::pair<int, int>> sample_pairs(int dim, std::size_t m,
                                              std::mt19937_64& rng) {
  std::vector<std::pair<int, int>> all;
  all.reserve(static_cast<std::size_t>(dim) * (dim - 1) / 2);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) all.emplace_back(i, j);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(m, all.size()));
  return all;
}

Matrix build_centroids(int p, int block) {
  Matrix c = Matrix::Zero(3, p);
  c.row(0).head(block).setOnes();
  c.row(0).tail(block).setOnes();
  c.row(1).head(block).setConstant(-1.0);
  c.row(1).tail(block).setConstant(-1.0);
  c.row(2).head(block).setOnes();
  c.row(2).tail(block).setConstant(-1.0);
  return c;
}

SyntheticInstance generate(const SyntheticSpec& spec, int block) {
  const int n = spec.n, p = spec.p;
  std::mt19937_64 rng(spec.seed);

  SyntheticInstance inst;
  inst.spec = spec;
  inst.omega_inv_true =
      gen_sparse_spd(n, spec.alpha1, spec.c1, rng());
  inst.sigma_inv_true =
      gen_sparse_spd(p, spec.alpha2, spec.c2, rng());

  const Matrix centroids = build_centroids(p, block);
  inst.m_true.resize(n, p);
  inst.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const int g = std::min(2, 3 * i / n);
    inst.labels[i] = g;
    inst.m_true.row(i) = centroids.row(g);
  }

  inst.y = inst.m_true + sample_matrix_normal(inst.omega_inv_true.dense(),
                                              inst.sigma_inv_true.dense(), n,
                                              p, rng());
  return inst;
}

}  // namespace

SparseSymmetric gen_sparse_spd(int dim, double alpha, double c,
                               std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("gen_sparse_spd: dim < 1");
  if (c < 1.0) throw std::invalid_argument("gen_sparse_spd: c < 1");
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("gen_sparse_spd: alpha outside [0,1]");

  if (c == 1.0) return SparseSymmetric::identity(dim);

  std::mt19937_64 rng(seed);
  const auto m = static_cast<std::size_t>(
      std::llround(alpha * dim * (dim - 1) / 2.0));

  SparseSymmetric out(dim);
  if (m == 0) {
    // No edges: hit the condition number on the diagonal alone, then scale
    // so the implied covariance has unit median variance.
    for (int i = 0; i < dim; ++i)
      out.diag(i) =
          1.0 + (c - 1.0) * (dim == 1 ? 0.0 : double(i) / (dim - 1));
    const double med = dim % 2 == 1
                           ? out.diag(dim / 2)
                           : 0.5 * (out.diag(dim / 2 - 1) + out.diag(dim / 2));
    out.diag /= med;
    return out;
  }

  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix a = Matrix::Zero(dim, dim);
  for (const auto& [i, j] : sample_pairs(dim, m, rng)) {
    const double w = unif(rng);
    a(i, j) = w;
    a(j, i) = w;
    out.offdiag.push_back({i, j, w});
  }

  // Affine spectral map: scale aA + bI keeps the pattern while pinning the
  // condition number to exactly c. A final global rescale puts the median
  // eigenvalue of the implied noise covariance at 1, so the bulk of the
  // noise keeps unit variance while the largest covariance direction grows
  // with c — plain PCA then degrades as c increases.
  SymEig eig = sym_eig(a);
  const double mu_max = eig.values(0);
  const double mu_min = eig.values(eig.values.size() - 1);
  if (mu_max - mu_min < 1e-12)
    throw std::runtime_error("gen_sparse_spd: degenerate spectrum");
  double scale = (1.0 - 1.0 / c) / (mu_max - mu_min);
  double shift = 1.0 / c - scale * mu_min;
  const auto nev = eig.values.size();
  const double mu_med =
      nev % 2 == 1 ? eig.values(nev / 2)
                   : 0.5 * (eig.values(nev / 2 - 1) + eig.values(nev / 2));
  const double med = scale * mu_med + shift;  // median precision eigenvalue
  scale /= med;
  shift /= med;
  for (auto& e : out.offdiag) e.value *= scale;
  out.diag.setConstant(shift);
  return out;
}

SyntheticInstance gen_small_scale(const SyntheticSpec& spec) {
  if (spec.p < 40)
    throw std::invalid_argument("gen_small_scale: p must be >= 40");
  return generate(spec, 20);
}

SyntheticInstance gen_large_scale(const SyntheticSpec& spec) {
  if (spec.p < 10)
    throw std::invalid_argument("gen_large_scale: p must be >= 10");
  return generate(spec, spec.p / 10);
}

std::pair<Matrix, std::vector<int>> gen_swiss_roll(int n_per_roll,
                                                   std::uint64_t seed) {
  if (n_per_roll < 1)
    throw std::invalid_argument("gen_swiss_roll: n_per_roll < 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(1.5 * M_PI, 4.5 * M_PI);
  std::uniform_real_distribution<double> uh(0.0, 10.0);

  Matrix pts(2 * n_per_roll, 3);
  std::vector<int> labels(2 * n_per_roll);
  for (int roll = 0; roll < 2; ++roll) {
    const double offset = roll * M_PI;  // half-turn radial offset interleaves
    for (int i = 0; i < n_per_roll; ++i) {
      const double t = ut(rng);
      const double h = uh(rng);
      const int row = roll * n_per_roll + i;
      pts(row, 0) = (t + offset) * std::cos(t);
      pts(row, 1) = h;
      pts(row, 2) = (t + offset) * std::sin(t);
      labels[row] = roll;
    }
  }
  return {pts, labels};
}

Matrix sample_matrix_normal(const Matrix& omega_inv, const Matrix& sigma_inv,
                            int n, int p, std::uint64_t seed) {
  const Matrix l_omega = cholesky(omega_inv);
  const Matrix l_sigma = cholesky(sigma_inv);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) z(i, j) = gauss(rng);

  // E = L_omega^{-T} Z L_sigma^{-1} has row covariance Omega and column
  // covariance Sigma.
  Matrix e = l_omega.transpose().triangularView<Eigen::Upper>().solve(z);
  e = l_sigma.transpose()
          .triangularView<Eigen::Upper>()
          .solve(e.transpose())
          .transpose()
          .eval();
  return e;
}

}  // namespace mnpca
