#pragma once

#include "npcg/nystrom.hpp"
#include "npcg/operators.hpp"
#include "npcg/types.hpp"

namespace npcg {

/**
 * @brief Nystrom preconditioner
 *
 *   P     = (1/(lambda_ell + mu)) U (Lambda + mu I) U^T + (I - U U^T)
 *   P^-1  = (lambda_ell + mu) U (Lambda + mu I)^-1 U^T + (I - U U^T)
 *
 * Every eigenvalue of P is (lambda_i + mu)/(lambda_ell + mu) >= 1 on
 * range(U) and exactly 1 off it.  Both actions cost O(n ell) and never
 * materialize P.  An empty approximation (ell = 0) yields the identity
 * preconditioner.
 */
struct NystromPreconditioner {
  Matrix u;
  Vector lambda;
  double lambda_ell = 0.0;  // smallest retained eigenvalue estimate
  double mu = 0.0;

  Index dim() const { return u.rows(); }
  Index size() const { return u.cols(); }

  /// P v in O(n ell).
  Vector apply(const Vector& v) const;
  /// P^-1 r in O(n ell).
  Vector apply_inverse(const Vector& r) const;
  /// P^-1 R column-wise.
  Matrix apply_inverse_block(const Matrix& r) const;
  /// Dense P, for oracle-scale checks.
  Matrix materialize() const;
};

/**
 * @brief Optimal rank-ell preconditioner built from the exact top
 * eigendecomposition:
 *
 *   P* = (1/(lambda_{ell+1} + mu)) V (Lambda_ell + mu I) V^T + (I - V V^T)
 *
 * Its preconditioned condition number is (lambda_{ell+1} + mu)/(lambda_n + mu),
 * the minimum possible for a rank-ell correction.  Reference implementation
 * for comparisons; built densely at test scale.
 */
struct OptimalPreconditioner {
  Matrix v_ell;
  Vector lambda_ell;
  double lambda_next = 0.0;  // lambda_{ell+1}
  double mu = 0.0;

  Index dim() const { return v_ell.rows(); }

  Vector apply(const Vector& v) const;
  Vector apply_inverse(const Vector& r) const;
  Matrix materialize() const;
};

/// Builds the Nystrom preconditioner from an approximation; mu must be > 0
/// (mu = 0 preconditioning is out of scope).  lambda_ell is the last
/// (smallest) entry of the approximation's eigenvalue list.
NystromPreconditioner build_preconditioner(const NystromApproximation& approx, double mu);

/// Exact-eigendecomposition reference preconditioner (1 <= ell < n).
OptimalPreconditioner optimal_preconditioner(const Matrix& a, Index ell, double mu);

/**
 * @brief Woodbury application of the approximate regularized inverse:
 * (U Lambda U^T + mu I)^-1 b = U (Lambda + mu I)^-1 U^T b + (1/mu)(b - U U^T b).
 */
Vector woodbury_inverse_apply(const Matrix& u, const Vector& lambda, double mu,
                              const Vector& b);

/**
 * @brief Nystrom sketch-and-solve: build a rank-ell approximation, then apply
 * the Woodbury inverse.  Fast but accuracy-limited: the relative error obeys
 * the deterministic bound ||x_hat - x_star|| / ||x_star|| <= ||E|| / mu
 * with E = A - A_hat.
 */
Vector sketch_and_solve(const LinearOperator& op, const Vector& b, double mu,
                        Index ell, Rng& rng);

}  // namespace npcg
