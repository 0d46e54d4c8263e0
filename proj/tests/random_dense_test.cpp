#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "support/test_support.hpp"

using namespace npcg;

TEST_CASE("rng is deterministic in the seed") {
  Rng a(7), b(7), c(8);
  bool all_equal = true;
  bool any_differ = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    all_equal = all_equal && (x == b.normal());
    any_differ = any_differ || (x != c.normal());
  }
  CHECK(all_equal);
  CHECK(any_differ);
}

TEST_CASE("normal deviates are finite with sane moments") {
  Rng rng(123);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    REQUIRE(std::isfinite(x));
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("uniform and integer stay in range") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto k = rng.integer(7);
    CHECK(k < 7);
  }
  CHECK_THROWS_AS(rng.integer(0), std::invalid_argument);
}

TEST_CASE("block draws align with column-wise stream consumption") {
  // Drawing n-by-a then n-by-b must reproduce the first a and next b columns
  // of a single n-by-(a+b) draw from the same seed; sketch extension and
  // benchmark replay both lean on this.
  const Index n = 17, a = 4, b = 6;
  Rng split(99), joint(99);
  const Matrix g1 = gaussian_matrix(split, n, a);
  const Matrix g2 = gaussian_matrix(split, n, b);
  const Matrix g = gaussian_matrix(joint, n, a + b);
  CHECK(g.leftCols(a) == g1);
  CHECK(g.rightCols(b) == g2);
}

TEST_CASE("gaussian_vector matches the first matrix column") {
  Rng r1(3), r2(3);
  const Vector v = gaussian_vector(r1, 11);
  const Matrix g = gaussian_matrix(r2, 11, 2);
  CHECK(v == g.col(0));
}

TEST_CASE("random_orthogonal produces an orthogonal matrix") {
  Rng rng(17);
  const Matrix q = random_orthogonal(rng, 25);
  const Matrix eye = Matrix::Identity(25, 25);
  CHECK((q.transpose() * q - eye).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((q * q.transpose() - eye).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sample_without_replacement yields distinct in-range indices") {
  Rng rng(11);
  const auto s = sample_without_replacement(rng, 20, 8);
  REQUIRE(s.size() == 8);
  std::set<Index> seen(s.begin(), s.end());
  CHECK(seen.size() == 8);
  for (Index i : s) {
    CHECK(i >= 0);
    CHECK(i < 20);
  }

  const auto all = sample_without_replacement(rng, 5, 5);
  CHECK(std::set<Index>(all.begin(), all.end()).size() == 5);

  CHECK_THROWS_AS(sample_without_replacement(rng, 3, 4), std::invalid_argument);
}

TEST_CASE("sym_eig recovers a known 2x2 spectrum") {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const auto eig = dense::sym_eig(a);
  CHECK(eig.values(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(eig.values(1) == doctest::Approx(1.0).epsilon(1e-14));
  // Eigenpairs reconstruct the matrix.
  const Matrix back = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
  CHECK((back - a).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("sym_eig orders eigenvalues descending on random input") {
  Rng rng(21);
  const Matrix a = test::random_psd(rng, 30);
  const auto eig = dense::sym_eig(a);
  for (Index j = 1; j < 30; ++j) CHECK(eig.values(j - 1) >= eig.values(j));
  const Matrix eye = Matrix::Identity(30, 30);
  CHECK((eig.vectors.transpose() * eig.vectors - eye).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((dense::sym_eigenvalues(a) - eig.values).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("thin_svd agrees with the Jacobi oracle") {
  Rng rng(31);
  const Matrix b = gaussian_matrix(rng, 12, 5);
  const auto svd = dense::thin_svd(b);
  Eigen::JacobiSVD<Matrix> oracle(b, Eigen::ComputeThinU);
  REQUIRE(svd.u.rows() == 12);
  REQUIRE(svd.u.cols() == 5);
  CHECK((svd.singular - oracle.singularValues()).cwiseAbs().maxCoeff() < 1e-12);
  // Left singular vectors match up to column sign.
  for (Index j = 0; j < 5; ++j) {
    const double s = svd.u.col(j).dot(oracle.matrixU().col(j)) < 0 ? -1.0 : 1.0;
    CHECK((svd.u.col(j) - s * oracle.matrixU().col(j)).norm() < 1e-10);
  }
  CHECK_THROWS_AS(dense::thin_svd(Matrix::Random(3, 5)), std::invalid_argument);
}

TEST_CASE("orthonormal_columns spans the input range") {
  Rng rng(41);
  const Matrix g = gaussian_matrix(rng, 15, 6);
  const Matrix q = dense::orthonormal_columns(g);
  const Matrix eye = Matrix::Identity(6, 6);
  CHECK((q.transpose() * q - eye).cwiseAbs().maxCoeff() < 1e-12);
  // Same range: the projector reproduces G.
  CHECK((q * (q.transpose() * g) - g).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("sym_inverse and sym_sqrt_inverse act as inverses") {
  Rng rng(51);
  const Matrix a = test::random_psd(rng, 20, 1e4);
  const Matrix eye = Matrix::Identity(20, 20);
  CHECK((dense::sym_inverse(a) * a - eye).cwiseAbs().maxCoeff() < 1e-9);
  const Matrix s = dense::sym_sqrt_inverse(a);
  CHECK((s * a * s - eye).cwiseAbs().maxCoeff() < 1e-9);

  CHECK_THROWS_AS(dense::sym_inverse(Matrix::Zero(3, 3)), std::invalid_argument);
  Matrix indef = Matrix::Identity(3, 3);
  indef(2, 2) = -1.0;
  CHECK_THROWS_AS(dense::sym_sqrt_inverse(indef), std::invalid_argument);
}

TEST_CASE("ulp_spacing matches machine epsilon at 1.0") {
  CHECK(dense::ulp_spacing(1.0) == std::numeric_limits<double>::epsilon());
  CHECK(dense::ulp_spacing(0.0) > 0.0);
  CHECK(dense::ulp_spacing(0.0) < 1e-300);
  CHECK(dense::ulp_spacing(2.0) == 2.0 * std::numeric_limits<double>::epsilon());
  CHECK(dense::ulp_spacing(-8.0) == dense::ulp_spacing(8.0));
}

TEST_CASE("materialize reproduces a dense operator bitwise") {
  Rng rng(61);
  const Matrix a = test::random_psd(rng, 10);
  const DenseOperator op(a);
  CHECK(dense::materialize(op) == a);
}

TEST_CASE("sym_spectral_norm equals the absolutely largest eigenvalue") {
  Matrix a(2, 2);
  a << 1, 0, 0, -4;
  CHECK(dense::sym_spectral_norm(a) == doctest::Approx(4.0).epsilon(1e-14));
}
