#include <random>

#include "doctest.h"
#include "mnpca/linalg.hpp"

using namespace mnpca;

namespace {

Matrix random_matrix(int n, int p, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix a(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = g(rng);
  return a;
}

}  // namespace

TEST_SUITE_BEGIN("linalg");

TEST_CASE("truncated_svd identity") {
  TruncatedSvd svd = truncated_svd(Matrix::Identity(3, 3), 3);
  for (int i = 0; i < 3; ++i) CHECK(svd.s(i) == doctest::Approx(1.0));
  CHECK((svd.u * svd.v.transpose() - Matrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("truncated_svd rank-1 outer product") {
  Vector a(3), b(4);
  a << 2, 0, 0;
  b << 0, 3, 0, 0;
  TruncatedSvd svd = truncated_svd(a * b.transpose(), 1);
  CHECK(svd.s(0) == doctest::Approx(6.0));
}

TEST_CASE("truncated_svd full reconstruction vs Gram eigendecomposition") {
  // Oracle: eigenvalues of A^T A are squared singular values.
  const Matrix a = random_matrix(8, 5, 71);
  TruncatedSvd svd = truncated_svd(a, 5);
  CHECK((svd.reconstruction() - a).norm() < 1e-10);

  SymEig eig = sym_eig(a.transpose() * a);
  for (int i = 0; i < 5; ++i)
    CHECK(svd.s(i) * svd.s(i) == doctest::Approx(eig.values(i)).epsilon(1e-8));
  CHECK((svd.u.transpose() * svd.u - Matrix::Identity(5, 5)).norm() < 1e-8);
  CHECK((svd.v.transpose() * svd.v - Matrix::Identity(5, 5)).norm() < 1e-8);
}

TEST_CASE("truncated_svd rejects bad input") {
  CHECK_THROWS_AS(truncated_svd(random_matrix(3, 3, 1), 4), RankTooLargeError);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(truncated_svd(bad, 1), NonFiniteError);
}

TEST_CASE("truncated_svd deterministic with canonical signs") {
  const Matrix a = random_matrix(9, 6, 5);
  TruncatedSvd s1 = truncated_svd(a, 4);
  TruncatedSvd s2 = truncated_svd(a, 4);
  CHECK(s1.s == s2.s);
  CHECK(s1.u == s2.u);
  CHECK(s1.v == s2.v);
  for (int c = 0; c < 4; ++c) {
    int idx = 0;
    s1.v.col(c).cwiseAbs().maxCoeff(&idx);
    CHECK(s1.v(idx, c) > 0.0);
  }
}

TEST_CASE("Eckart-Young spot check against random rank-k matrices") {
  std::mt19937_64 rng(42);
  const Matrix a = random_matrix(7, 6, 9);
  const int k = 2;
  const double best = (a - truncated_svd(a, k).reconstruction()).norm();
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix b = random_matrix(7, k, rng()) *
                     random_matrix(k, 6, rng());
    CHECK(best <= (a - b).norm() + 1e-12);
  }
}

TEST_CASE("cholesky identity and hand 2x2") {
  CHECK((cholesky(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).norm() <
        1e-14);
  Matrix a(2, 2);
  a << 4, 2, 2, 3;
  const Matrix l = cholesky(a);
  CHECK(l(0, 0) == doctest::Approx(2.0));
  CHECK(l(1, 0) == doctest::Approx(1.0));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(l(0, 1) == 0.0);
}

TEST_CASE("cholesky rejects indefinite") {
  Matrix a(2, 2);
  a << 1, 2, 2, 1;  // eigenvalues 3, -1
  CHECK_THROWS_AS(cholesky(a), NotPositiveDefiniteError);
}

TEST_CASE("cholesky round trip on random factors") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix l = Matrix::Zero(5, 5);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < i; ++j) l(i, j) = u(rng) - 1.1;
      l(i, i) = u(rng);
    }
    const Matrix a = l * l.transpose();
    const Matrix l2 = cholesky(a);
    CHECK((l2 * l2.transpose() - a).norm() / a.norm() < 1e-8);
  }
}

TEST_CASE("solve_spd basics") {
  const Matrix b = random_matrix(4, 2, 11);
  CHECK((solve_spd(Matrix::Identity(4, 4), b) - b).norm() < 1e-14);

  Matrix d = Vector::LinSpaced(2, 2, 4).asDiagonal();
  Vector rhs(2);
  rhs << 2, 4;
  const Matrix x = solve_spd(d, rhs);
  CHECK(x(0, 0) == doctest::Approx(1.0));
  CHECK(x(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("solve_spd residual oracle on random SPD") {
  const Matrix g = random_matrix(6, 6, 17);
  const Matrix a = g.transpose() * g + Matrix::Identity(6, 6);
  const Matrix b = random_matrix(6, 3, 18);
  const Matrix x = solve_spd(a, b);
  CHECK((a * x - b).norm() / b.norm() < 1e-10);
}

TEST_CASE("sym_eig diagonal and swap") {
  Vector d(3);
  d << 3, 1, 2;
  SymEig eig = sym_eig(Matrix(d.asDiagonal()));
  CHECK(eig.values(0) == doctest::Approx(3.0));
  CHECK(eig.values(1) == doctest::Approx(2.0));
  CHECK(eig.values(2) == doctest::Approx(1.0));

  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  eig = sym_eig(swap);
  CHECK(eig.values(0) == doctest::Approx(1.0));
  CHECK(eig.values(1) == doctest::Approx(-1.0));
  CHECK(std::abs(eig.vectors(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("sym_eig trace invariance and residual") {
  Matrix a = random_matrix(5, 5, 23);
  a = 0.5 * (a + a.transpose()).eval();
  SymEig eig = sym_eig(a);
  CHECK(eig.values.sum() == doctest::Approx(a.trace()).epsilon(1e-10));
  CHECK((a * eig.vectors - eig.vectors * eig.values.asDiagonal()).norm() <
        1e-8);
  CHECK((eig.vectors.transpose() * eig.vectors - Matrix::Identity(5, 5))
            .norm() < 1e-8);
}

TEST_CASE("SparseSymmetric densification is symmetric") {
  SparseSymmetric s(4);
  s.diag << 1, 2, 3, 4;
  s.offdiag = {{0, 2, -0.5}, {1, 3, 0.25}};
  const Matrix d = s.dense();
  CHECK(d == d.transpose().eval());
  CHECK(d(2, 0) == -0.5);
  CHECK(SparseSymmetric::from_dense(d).nnz_offdiag() == 2);
}

TEST_SUITE_END();
