#pragma once

#include <optional>

#include "npcg/nystrom.hpp"
#include "npcg/operators.hpp"
#include "npcg/random.hpp"

namespace npcg {

/// Rank-selection strategy: a posteriori error estimate (strategy 1),
/// eigenvalue ratio (strategy 2), or a fixed user-chosen rank (strategy 3).
enum class TolMode { error, ratio, fixed };

/// Test-matrix family used by the doubling loop.
enum class SketchKind { gaussian, column_sampling };

/**
 * @brief Configuration of the adaptive rank search.
 *
 * tau defaults to 30 in error mode (tolerance Tol = tau*mu; sensible
 * range [1, 100]) and to 10 in ratio mode
 * (stop when lambda_ell / mu <= tau).  The secondary error-mode criterion
 * lambda_ell <= tau*mu/11 is on by default and can be disabled.
 */
struct AdaptiveConfig {
  Index ell0 = 10;
  Index ell_max = 0;  // required; must satisfy ell0 <= ell_max <= n
  double mu = 0.0;    // required > 0
  TolMode tol_mode = TolMode::error;
  std::optional<double> tau;  // default 30 (error) / 10 (ratio)
  Index q = 5;                // power iterations for the error estimate
  bool secondary_criterion = true;
  SketchKind sketch = SketchKind::gaussian;

  double resolved_tau() const;
};

/// @brief Result of an adaptive (or fixed) rank search.
struct AdaptiveOutcome {
  NystromApproximation approximation;
  std::optional<double> error_estimate;  // E_hat; absent in ratio mode
  Index doublings = 0;                   // sketch growth events after the initial build
  bool hit_cap = false;
  double posterior_condition_estimate = 0.0;  // (lambda_ell + mu + E_hat)/mu
  Index ell_final = 0;
};

/**
 * @brief Randomized power method for estimating ||E||, E = A - U Lambda U^T.
 *
 * q iterations from a normalized Gaussian start; returns the final
 * Rayleigh-quotient estimate, which never exceeds ||E|| when E is psd
 * (always the case for Nystrom approximations, up to roundoff).
 */
double estimate_error_power(const LinearOperator& op, const Matrix& u,
                            const Vector& lambda, Index q, Rng& rng);
double estimate_error_power(const LinearOperator& op, const NystromApproximation& approx,
                            Index q, Rng& rng);

/**
 * @brief Adaptive rank doubling, strategy 1.
 *
 * Build at ell0; loop: estimate E_hat by the power method, stop once
 * E_hat <= tau*mu (and, unless disabled, lambda_ell <= tau*mu/11); otherwise
 * double ell by extending the cached sketch.  When doubling would exceed
 * ell_max the sketch is topped up to exactly ell_max, rebuilt once, and the
 * search stops with hit_cap = true and no final re-estimate.
 */
AdaptiveOutcome adaptive_nystrom(const LinearOperator& op, const AdaptiveConfig& config,
                                 Rng& rng);

/// Strategy 2: identical doubling loop, stopping when lambda_ell / mu <= tau;
/// the power method is skipped entirely.
AdaptiveOutcome adaptive_nystrom_ratio(const LinearOperator& op,
                                       const AdaptiveConfig& config, Rng& rng);

/// Strategy 3: build once at ell_max ("as large as the user can afford") and
/// report the posterior condition estimate from a q-step error estimate.
AdaptiveOutcome fixed_rank_nystrom(const LinearOperator& op, const AdaptiveConfig& config,
                                   Rng& rng);

/// Posterior bound (lambda_ell + mu + E_hat)/mu on the preconditioned
/// condition number; rejects mu <= 0 or negative inputs.
double posterior_condition_estimate(double lambda_ell, double mu, double err_estimate);

}  // namespace npcg
