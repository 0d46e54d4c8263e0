#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "support/test_support.hpp"

using namespace npcg;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

/// Dense-agreement invariant: matvec matches the materialized matrix on a
/// batch of random probes to relative 1e-12.
void check_dense_agreement(const LinearOperator& op, std::uint64_t seed) {
  const Matrix m = dense::materialize(op);
  Rng rng(seed);
  for (int t = 0; t < 20; ++t) {
    const Vector v = gaussian_vector(rng, op.dim());
    const Vector want = m * v;
    CHECK(test::rel_diff(op.matvec(v), want) < 1e-12);
  }
  // apply_block issues the same products batched.
  const Matrix probe = gaussian_matrix(rng, op.dim(), 5);
  CHECK(test::rel_diff(op.apply_block(probe), m * probe) < 1e-12);
}

}  // namespace

TEST_CASE("identity operator returns its input") {
  const DenseOperator op(Matrix::Identity(3, 3));
  CHECK(op.matvec(vec3(1, 2, 3)) == vec3(1, 2, 3));
  CHECK(op.dim() == 3);
}

TEST_CASE("zero operator maps everything to zero") {
  const DenseOperator op(Matrix::Zero(2, 2));
  CHECK(op.matvec(vec2(5, -1)) == vec2(0, 0));
}

TEST_CASE("dense matvec on a 2x2 example") {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const DenseOperator op(a);
  CHECK(op.matvec(vec2(1, 0)) == vec2(2, 1));
  CHECK(op.has_column_access());
  CHECK(op.column(1) == vec2(1, 2));
}

TEST_CASE("matvec validates dimension and finiteness") {
  const DenseOperator op(Matrix::Identity(3, 3));
  CHECK_THROWS_AS(op.matvec(vec2(1, 2)), std::invalid_argument);
  Vector bad = vec3(1, 2, std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(op.matvec(bad), std::invalid_argument);
  CHECK_THROWS_AS(op.column(3), std::invalid_argument);
}

TEST_CASE("dense operator rejects nonsquare and asymmetric input") {
  CHECK_THROWS_AS(DenseOperator(Matrix::Zero(2, 3)), std::invalid_argument);
  Matrix skew(2, 2);
  skew << 0, 1, -1, 0;
  CHECK_THROWS_AS(DenseOperator{skew}, std::invalid_argument);
}

TEST_CASE("regularize adds mu I") {
  SUBCASE("zero operator with mu = 1 becomes the identity") {
    auto zero = std::make_shared<DenseOperator>(Matrix::Zero(2, 2));
    const RegularizedOperator op = regularize(zero, 1.0);
    CHECK(op.matvec(vec2(3, 4)) == vec2(3, 4));
  }
  SUBCASE("diag(2, 1) with mu = 0.5") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 1.0;
    const DenseOperator base(a);
    const RegularizedOperator op(base, 0.5);
    CHECK(op.matvec(vec2(1, 1)) == vec2(2.5, 1.5));
    CHECK(op.mu() == 0.5);
  }
  SUBCASE("mu = 0 leaves the operator unchanged") {
    Rng rng(2);
    const Matrix a = test::random_psd(rng, 8);
    const DenseOperator base(a);
    const RegularizedOperator op(base, 0.0);
    const Vector v = gaussian_vector(rng, 8);
    CHECK(op.matvec(v) == base.matvec(v));
  }
  SUBCASE("negative mu is rejected") {
    const DenseOperator base(Matrix::Identity(2, 2));
    CHECK_THROWS_AS(RegularizedOperator(base, -0.1), std::invalid_argument);
  }
}

TEST_CASE("gram_ridge applies (1/n_rows) G^T G") {
  SUBCASE("identity design halves the input") {
    const GramRidgeOperator op = gram_ridge(Matrix::Identity(2, 2));
    CHECK(op.matvec(vec2(2, 4)) == vec2(1, 2));
    CHECK(op.n_rows() == 2);
  }
  SUBCASE("diagonal design") {
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = 1.0;
    g(1, 1) = 2.0;
    const GramRidgeOperator op = gram_ridge(g);
    CHECK(op.matvec(vec2(1, 1)) == vec2(0.5, 2.0));
  }
  SUBCASE("random design matches the dense Gram matrix") {
    Rng rng(9);
    const Matrix g = gaussian_matrix(rng, 6, 3);
    const GramRidgeOperator op = gram_ridge(g);
    const Matrix gram = g.transpose() * g / 6.0;
    const Vector v = gaussian_vector(rng, 3);
    CHECK(test::rel_diff(op.matvec(v), gram * v) < 1e-12);
  }
  SUBCASE("empty design is rejected") {
    CHECK_THROWS_AS(gram_ridge(Matrix()), std::invalid_argument);
  }
}

TEST_CASE("gram operator eigenvalues are squared singular values over n_rows") {
  Rng rng(13);
  const Matrix g = gaussian_matrix(rng, 20, 8);
  const GramRidgeOperator op = gram_ridge(g);
  const Vector eig = dense::sym_eigenvalues(dense::materialize(op));
  Eigen::JacobiSVD<Matrix> svd(g);
  const Vector want = svd.singularValues().array().square() / 20.0;
  CHECK((eig - want).cwiseAbs().maxCoeff() < 1e-12 * want(0));
}

TEST_CASE("gaussian kernel entries") {
  SUBCASE("identical points give the all-ones matrix") {
    Matrix pts(2, 3);
    pts.row(0) << 1.0, -2.0, 0.5;
    pts.row(1) = pts.row(0);
    const KernelOperator op = gaussian_kernel(pts, 1.0);
    const Matrix k = dense::materialize(op);
    CHECK(k == Matrix::Ones(2, 2));
  }
  SUBCASE("two 1-d points at distance 2 with sigma = 1") {
    Matrix pts(2, 1);
    pts << 0.0, 2.0;
    const KernelOperator op = gaussian_kernel(pts, 1.0);
    const Matrix k = dense::materialize(op);
    CHECK(k(0, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(k(1, 0) == k(0, 1));
    CHECK(k(0, 0) == 1.0);
    CHECK(k(1, 1) == 1.0);
  }
  SUBCASE("diagonal is exactly one") {
    Rng rng(3);
    const Matrix pts = gaussian_matrix(rng, 40, 4);
    const KernelOperator op = gaussian_kernel(pts, 1.5);
    const Matrix k = dense::materialize(op);
    for (Index i = 0; i < 40; ++i) CHECK(k(i, i) == 1.0);
  }
  SUBCASE("sigma <= 0 is rejected") {
    CHECK_THROWS_AS(gaussian_kernel(Matrix::Zero(2, 1), 0.0), std::invalid_argument);
  }
}

TEST_CASE("gaussian kernel matrices are positive semidefinite") {
  Rng rng(19);
  const Matrix pts = gaussian_matrix(rng, 120, 5);
  const KernelOperator op = gaussian_kernel(pts, 2.0);
  const Matrix k = dense::materialize(op);
  CHECK(test::min_eigenvalue(k) > -1e-10);
}

TEST_CASE("blockwise kernel path matches the dense path") {
  Rng rng(23);
  const Matrix pts = gaussian_matrix(rng, 35, 3);
  const KernelOperator dense_op = gaussian_kernel(pts, 1.2);
  const KernelOperator block_op = gaussian_kernel(pts, 1.2, /*dense_cap=*/4);
  REQUIRE(dense_op.is_dense());
  REQUIRE(!block_op.is_dense());
  const Vector v = gaussian_vector(rng, 35);
  CHECK(test::rel_diff(block_op.matvec(v), dense_op.matvec(v)) < 1e-12);
  for (Index j : {Index(0), Index(17), Index(34)})
    CHECK(test::rel_diff(block_op.column(j), dense_op.column(j)) < 1e-14);
}

TEST_CASE("spectrum profile validation") {
  CHECK_THROWS_AS(SpectrumProfile{Vector()}, std::invalid_argument);
  CHECK_THROWS_AS(SpectrumProfile{vec2(1, 2)}, std::invalid_argument);
  CHECK_THROWS_AS(SpectrumProfile{vec2(1, -1)}, std::invalid_argument);
  const SpectrumProfile ok(vec3(3, 2, 2));
  CHECK(ok.size() == 3);
}

TEST_CASE("synthesize_operator realizes the requested spectrum") {
  SUBCASE("all-ones profile behaves as the identity") {
    const SpectrumProfile profile{Vector::Ones(12)};
    const DenseOperator op = synthesize_operator(profile, 7);
    Rng rng(1);
    const Vector v = gaussian_vector(rng, 12);
    CHECK(test::rel_diff(op.matvec(v), v) < 1e-12);
  }
  SUBCASE("eigenvalues match the profile") {
    const SpectrumProfile profile{vec3(4, 2, 1)};
    const DenseOperator op = synthesize_operator(profile, 11);
    const Vector eig = dense::sym_eigenvalues(op.dense());
    CHECK((eig - vec3(4, 2, 1)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("same seed gives bitwise-identical operators") {
    const SpectrumProfile profile{vec3(3, 1, 0.5)};
    const DenseOperator a = synthesize_operator(profile, 99);
    const DenseOperator b = synthesize_operator(profile, 99);
    CHECK(a.dense() == b.dense());
    const DenseOperator c = synthesize_operator(profile, 100);
    CHECK(a.dense() != c.dense());
  }
}

TEST_CASE("every operator kind agrees with its materialized copy") {
  Rng rng(77);
  const Matrix a = test::random_psd(rng, 15);
  check_dense_agreement(DenseOperator(a), 101);

  const DenseOperator base(a);
  check_dense_agreement(RegularizedOperator(base, 0.3), 102);

  check_dense_agreement(gram_ridge(gaussian_matrix(rng, 20, 9)), 103);

  check_dense_agreement(gaussian_kernel(gaussian_matrix(rng, 25, 4), 1.1), 104);

  const SpectrumProfile profile{test::poly_spectrum(10, 1.0)};
  check_dense_agreement(synthesize_operator(profile, 5), 105);
}
