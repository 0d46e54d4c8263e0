#pragma once

#include <vector>

#include "npcg/operators.hpp"
#include "npcg/random.hpp"
#include "npcg/types.hpp"

namespace npcg {

/**
 * @brief Randomized Nystrom approximation of A in factored form U diag(lambda) U^T.
 *
 * Produced by the shifted, Cholesky-based pipeline: U has orthonormal
 * columns, the eigenvalue estimates are nonincreasing and nonnegative, and
 * shift_used records the stabilization shift nu that was actually applied
 * (after any escalation retries).
 */
struct NystromApproximation {
  Matrix u;        // n-by-ell, orthonormal columns
  Vector lambda;   // nonincreasing, >= 0 (clamped)
  double shift_used = 0.0;

  Index dim() const { return u.rows(); }
  /// Sketch size ell (number of retained columns).
  Index size() const { return u.cols(); }
  /// Number of strictly positive eigenvalue estimates.
  Index rank() const;
  /// Smallest retained eigenvalue estimate (0 for an empty approximation).
  double lambda_min() const;
  /// U diag(lambda) U^T, for oracle-scale checks.
  Matrix materialize() const;
};

/**
 * @brief Cached test matrix and sketch, retained so the adaptive loop can
 * enlarge a draw instead of starting over.
 *
 * Columns of omega are kept jointly orthonormal; y column j equals
 * A * (omega column j).
 */
struct SketchPair {
  Matrix omega;
  Matrix y;

  Index dim() const { return omega.rows(); }
  Index size() const { return omega.cols(); }
};

/// Empty sketch of dimension n, the seed value for extend_sketch.
SketchPair make_empty_sketch(Index n);

/**
 * @brief Append `extra` fresh orthonormalized Gaussian columns and their
 * matvecs; previous columns are unchanged.
 *
 * New columns are orthonormalized against the existing ones (block
 * Gram-Schmidt, two passes, then thin QR) so the joint-orthonormality
 * invariant of SketchPair survives extension.  The approximation built from
 * the result matches a fresh run on the concatenated Gaussian draw because
 * the Nystrom approximation depends on the test matrix only through its
 * range.
 */
SketchPair extend_sketch(const SketchPair& pair, const LinearOperator& op,
                         Index extra, Rng& rng);

/// Append `extra` fresh distinct columns of A chosen uniformly without
/// replacement from the indices not in `used`; used is updated in place.
SketchPair extend_sketch_columns(const SketchPair& pair, const LinearOperator& op,
                                 Index extra, std::vector<Index>& used, Rng& rng);

/**
 * @brief Finish the stable pipeline on a cached sketch.
 *
 * Shift nu = ulp(||Y||_F), Cholesky of Omega^T (Y + nu Omega), triangular
 * solve, thin SVD, eigenvalue clamp max{0, sigma^2 - nu}.  Cholesky
 * breakdown escalates nu by 10x up to 3 retries before failing with
 * diagnostics.
 */
NystromApproximation nystrom_from_sketch(const SketchPair& pair);

/**
 * @brief Stable randomized Nystrom approximation with a Gaussian test matrix.
 *
 * Draws an n-by-ell Gaussian, orthonormalizes it, computes the sketch with
 * ell matvecs, and finishes via nystrom_from_sketch.  ell = n is allowed
 * (full-rank Nystrom); ell > n is rejected.
 */
NystromApproximation randomized_nystrom(const LinearOperator& op, Index ell, Rng& rng);

/**
 * @brief Column-sampling Nystrom: the test matrix columns are distinct
 * standard basis vectors sampled uniformly without replacement.
 *
 * Requires column access on the operator; the output is factored by the
 * same stable pipeline as the Gaussian variant.
 */
NystromApproximation column_sampling_nystrom(const LinearOperator& op, Index ell, Rng& rng);

/// Column-sampling Nystrom with caller-chosen distinct column indices.
NystromApproximation column_sampling_nystrom(const LinearOperator& op,
                                             const std::vector<Index>& indices);

/**
 * @brief Definitional Nystrom approximation (AX)(X^T A X)^+ (AX)^T, evaluated
 * densely.  Correctness oracle only; n is capped at 2000.
 */
Matrix nystrom_definitional(const Matrix& a, const Matrix& x);

/**
 * @brief Expected spectral-norm error bound for a Gaussian sketch of size ell
 * on a matrix with the given spectrum.
 *
 * For ell = 2p-1 this returns the simplified bound
 * 3 lambda_p + (4 e^2 / p) sum_{j>=p} lambda_j  (= (3 + (4e^2/p) sr_p) lambda_p);
 * otherwise, for 2 <= p <= ell-2, the general form
 * (1 + 2(ell-p)/(p-1)) lambda_{ell-p+1} + (2 e^2 ell / (p^2-1)) sum_{j>ell-p} lambda_j.
 * Parameters outside both ranges are rejected.
 */
double expected_error_bound(const SpectrumProfile& profile, Index ell, Index p);

}  // namespace npcg
