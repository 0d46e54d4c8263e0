#pragma once

#include <optional>

#include "npcg/operators.hpp"
#include "npcg/preconditioner.hpp"
#include "npcg/types.hpp"

namespace npcg {

/**
 * @brief Deterministic condition-number sandwich for the Nystrom
 * preconditioner:
 *
 *   lower = max{ (lambda_ell + mu)/(lambda_n + mu), 1 }
 *   upper = (lambda_ell + mu + ||E||) * min{ 1/mu,
 *            (lambda_ell + lambda_n + 2 mu) / ((lambda_ell + mu)(lambda_n + mu)) }
 *
 * The 1/mu branch is skipped when mu = 0.
 */
struct ConditionBounds {
  double lower = 1.0;
  double upper = 1.0;
  double lambda_ell = 0.0;
  double mu = 0.0;
  double err_norm = 0.0;
  double lambda_n = 0.0;
};

/// First violation found by key_lemma_check, if any.
struct LemmaCheckResult {
  bool ok = true;
  int item = 0;      // 1 or 2 when a violation is reported
  Index index = 0;   // offending j (item 1) or k (item 2), 1-based
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Effective dimension d_eff(mu) = sum_j lambda_j / (lambda_j + mu); mu > 0.
double effective_dimension(const SpectrumProfile& profile, double mu);

/// p-stable rank sr_p = lambda_p^{-1} sum_{j>=p} lambda_j (inclusive sum);
/// p is 1-based and lambda_p must be positive.
double p_stable_rank(const SpectrumProfile& profile, Index p);

/// Sketch-size rule ell = 2*ceil(1.5*d_eff(mu)) + 1, clamped to n.
Index recommended_sketch_size(const SpectrumProfile& profile, double mu);

/// Deterministic two-sided condition-number bound (see ConditionBounds).
ConditionBounds condition_bounds(double lambda_ell, double mu, double err_norm,
                                 double lambda_n);

/**
 * @brief Dense oracle for kappa_2(P^{-1/2} A_mu P^{-1/2}).
 *
 * Materializes P, takes its symmetric square root by eigendecomposition, and
 * returns lambda_max / lambda_min of the symmetrically preconditioned matrix.
 * Oracle scale only (n <= 2000); rejects a non-positive-definite P.
 */
double exact_condition_number(const NystromPreconditioner& p, const Matrix& a_mu);
double exact_condition_number(const OptimalPreconditioner& p, const Matrix& a_mu);

/**
 * @brief Exhaustive check of both effective-dimension facts on a spectrum:
 *
 *   (1) j >= (1 + 1/gamma) d_eff(mu)  implies  lambda_j <= gamma*mu
 *   (2) k >= d_eff(mu)                implies  (1/k) sum_{j>k} lambda_j <= (d_eff(mu)/k) mu
 *
 * Scans every admissible j and k; returns the first violation if any.
 */
LemmaCheckResult key_lemma_check(const SpectrumProfile& profile, double mu, double gamma);

}  // namespace npcg
