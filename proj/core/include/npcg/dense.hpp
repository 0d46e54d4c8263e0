#pragma once

#include "npcg/operators.hpp"
#include "npcg/types.hpp"

/**
 * Dense linear-algebra helpers shared by the library and the test oracles.
 *
 * Symmetric eigendecompositions and thin SVDs are routed to LAPACK
 * (dsyevd / dgesdd) because the acceptance harness runs dense oracles at
 * n = 1000 on a single core; everything else stays in Eigen.
 */
namespace npcg::dense {

struct Eigendecomposition {
  Vector values;   // descending, values[0] = lambda_1
  Matrix vectors;  // column j pairs with values[j]
};

struct ThinSvd {
  Matrix u;        // m-by-k, k = min(m, n)
  Vector singular; // descending
};

/// Materialize an operator by probing with basis vectors (oracle scale).
Matrix materialize(const LinearOperator& op);

/// Full symmetric eigendecomposition, eigenvalues descending.
Eigendecomposition sym_eig(const Matrix& a);

/// Eigenvalues only (descending) of a symmetric matrix.
Vector sym_eigenvalues(const Matrix& a);

/// Spectral norm of a symmetric matrix: max |eigenvalue|.
double sym_spectral_norm(const Matrix& a);

/// Inverse via eigendecomposition; rejects numerically singular input.
Matrix sym_inverse(const Matrix& a);

/// Inverse symmetric square root; rejects non positive definite input.
Matrix sym_sqrt_inverse(const Matrix& a);

/// Left singular vectors and singular values of a tall matrix (m >= n).
ThinSvd thin_svd(const Matrix& b);

/// Orthonormal basis of range(g) via thin QR (g must have full column rank).
Matrix orthonormal_columns(const Matrix& g);

/// Unit-in-last-place spacing of double precision at magnitude x.
double ulp_spacing(double x);

}  // namespace npcg::dense
