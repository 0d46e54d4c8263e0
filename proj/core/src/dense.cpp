#include "npcg/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <lapacke.h>

namespace npcg::dense {

namespace {

void reverse_inplace(Vector& values, Matrix* vectors) {
  // LAPACK returns ascending eigenvalues; the library convention is
  // descending (lambda_1 first).
  values.reverseInPlace();
  if (vectors != nullptr) *vectors = vectors->rowwise().reverse().eval();
}

}  // namespace

Matrix materialize(const LinearOperator& op) {
  const Index n = op.dim();
  Matrix probe = Matrix::Identity(n, n);
  return op.apply_block(probe);
}

Eigendecomposition sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig: matrix must be square");
  Eigendecomposition out;
  out.vectors = a;
  out.values.resize(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.rows());
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                         out.vectors.data(), n, out.values.data());
  if (info != 0)
    throw std::runtime_error("sym_eig: dsyevd failed with info = " + std::to_string(info));
  reverse_inplace(out.values, &out.vectors);
  return out;
}

Vector sym_eigenvalues(const Matrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("sym_eigenvalues: matrix must be square");
  Matrix work = a;
  Vector values(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.rows());
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, values.data());
  if (info != 0)
    throw std::runtime_error("sym_eigenvalues: dsyevd failed with info = " +
                             std::to_string(info));
  reverse_inplace(values, nullptr);
  return values;
}

double sym_spectral_norm(const Matrix& a) {
  const Vector values = sym_eigenvalues(a);
  if (values.size() == 0) return 0.0;
  return std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
}

Matrix sym_inverse(const Matrix& a) {
  const Eigendecomposition eig = sym_eig(a);
  const double top = std::abs(eig.values(0));
  for (Index i = 0; i < eig.values.size(); ++i)
    if (std::abs(eig.values(i)) <= 1e-14 * top)
      throw std::invalid_argument("sym_inverse: matrix is numerically singular");
  return eig.vectors * eig.values.cwiseInverse().asDiagonal() * eig.vectors.transpose();
}

Matrix sym_sqrt_inverse(const Matrix& a) {
  const Eigendecomposition eig = sym_eig(a);
  if (eig.values.size() == 0 || eig.values(eig.values.size() - 1) <= 0.0)
    throw std::invalid_argument("sym_sqrt_inverse: matrix is not positive definite");
  return eig.vectors * eig.values.cwiseSqrt().cwiseInverse().asDiagonal() *
         eig.vectors.transpose();
}

ThinSvd thin_svd(const Matrix& b) {
  const Index m = b.rows(), n = b.cols();
  if (m < n) throw std::invalid_argument("thin_svd: expected a tall (m >= n) matrix");
  ThinSvd out;
  Matrix work = b;
  out.u.resize(m, n);
  out.singular.resize(n);
  Matrix vt(n, n);
  const lapack_int info = LAPACKE_dgesdd(
      LAPACK_COL_MAJOR, 'S', static_cast<lapack_int>(m), static_cast<lapack_int>(n),
      work.data(), static_cast<lapack_int>(m), out.singular.data(), out.u.data(),
      static_cast<lapack_int>(m), vt.data(), static_cast<lapack_int>(n));
  if (info != 0)
    throw std::runtime_error("thin_svd: dgesdd failed with info = " + std::to_string(info));
  return out;
}

Matrix orthonormal_columns(const Matrix& g) {
  const Index m = g.rows(), n = g.cols();
  if (m < n)
    throw std::invalid_argument("orthonormal_columns: expected a tall (m >= n) matrix");
  Matrix q = g;
  Vector tau(std::min(m, n));
  lapack_int info = LAPACKE_dgeqrf(LAPACK_COL_MAJOR, static_cast<lapack_int>(m),
                                   static_cast<lapack_int>(n), q.data(),
                                   static_cast<lapack_int>(m), tau.data());
  if (info != 0)
    throw std::runtime_error("orthonormal_columns: dgeqrf failed with info = " +
                             std::to_string(info));
  info = LAPACKE_dorgqr(LAPACK_COL_MAJOR, static_cast<lapack_int>(m),
                        static_cast<lapack_int>(n), static_cast<lapack_int>(n), q.data(),
                        static_cast<lapack_int>(m), tau.data());
  if (info != 0)
    throw std::runtime_error("orthonormal_columns: dorgqr failed with info = " +
                             std::to_string(info));
  return q;
}

double ulp_spacing(double x) {
  const double ax = std::abs(x);
  return std::nextafter(ax, std::numeric_limits<double>::infinity()) - ax;
}

}  // namespace npcg::dense
