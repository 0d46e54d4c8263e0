#include "npcg/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace npcg {

double AdaptiveConfig::resolved_tau() const {
  if (tau.has_value()) {
    if (!(*tau > 0.0)) throw std::invalid_argument("AdaptiveConfig: tau must be > 0");
    return *tau;
  }
  return tol_mode == TolMode::ratio ? 10.0 : 30.0;
}

namespace {

void validate_config(const LinearOperator& op, const AdaptiveConfig& config) {
  const Index n = op.dim();
  if (config.ell0 < 1 || config.ell0 > config.ell_max || config.ell_max > n)
    throw std::invalid_argument("AdaptiveConfig: need 1 <= ell0 <= ell_max <= dim");
  if (!(config.mu > 0.0)) throw std::invalid_argument("AdaptiveConfig: mu must be > 0");
  if (config.q < 1) throw std::invalid_argument("AdaptiveConfig: q must be >= 1");
  config.resolved_tau();
  if (config.sketch == SketchKind::column_sampling && !op.has_column_access())
    throw std::runtime_error("AdaptiveConfig: column sampling needs column access");
}

SketchPair grow(const SketchPair& pair, const LinearOperator& op, Index extra,
                std::vector<Index>& used, const AdaptiveConfig& config, Rng& rng) {
  if (config.sketch == SketchKind::column_sampling)
    return extend_sketch_columns(pair, op, extra, used, rng);
  return extend_sketch(pair, op, extra, rng);
}

void finalize(AdaptiveOutcome& outcome, double mu) {
  outcome.ell_final = outcome.approximation.size();
  const double err = outcome.error_estimate ? std::max(0.0, *outcome.error_estimate) : 0.0;
  outcome.posterior_condition_estimate =
      posterior_condition_estimate(outcome.approximation.lambda_min(), mu, err);
}

/**
 * @brief Shared doubling loop for strategies 1 and 2.
 *
 * `should_stop` inspects the current approximation (computing the error
 * estimate in strategy 1) and fills outcome.error_estimate as a side effect.
 */
template <class StopFn>
AdaptiveOutcome doubling_loop(const LinearOperator& op, const AdaptiveConfig& config,
                              Rng& rng, StopFn&& should_stop) {
  validate_config(op, config);
  AdaptiveOutcome outcome;
  std::vector<Index> used;
  SketchPair pair = grow(make_empty_sketch(op.dim()), op, config.ell0, used, config, rng);
  outcome.approximation = nystrom_from_sketch(pair);

  while (true) {
    if (should_stop(outcome)) break;
    const Index ell = pair.size();
    if (ell >= config.ell_max) {
      outcome.hit_cap = true;
      break;
    }
    // Double the sketch when it fits; otherwise top up to exactly ell_max,
    // rebuild once, and stop without re-estimating.
    const Index extra = 2 * ell <= config.ell_max ? ell : config.ell_max - ell;
    pair = grow(pair, op, extra, used, config, rng);
    ++outcome.doublings;
    outcome.approximation = nystrom_from_sketch(pair);
    if (pair.size() == config.ell_max && 2 * ell > config.ell_max) {
      outcome.hit_cap = true;
      break;
    }
  }
  finalize(outcome, config.mu);
  return outcome;
}

}  // namespace

double estimate_error_power(const LinearOperator& op, const Matrix& u,
                            const Vector& lambda, Index q, Rng& rng) {
  const Index n = op.dim();
  if (q < 1) throw std::invalid_argument("estimate_error_power: q must be >= 1");
  if (u.cols() != lambda.size() || (u.cols() > 0 && u.rows() != n))
    throw std::invalid_argument("estimate_error_power: factor shape mismatch");

  Vector v = gaussian_vector(rng, n);
  const double v0 = v.norm();
  if (v0 == 0.0) return 0.0;
  v /= v0;
  double estimate = 0.0;
  for (Index i = 0; i < q; ++i) {
    Vector w = op.matvec(v);
    if (u.cols() > 0) w.noalias() -= u * lambda.cwiseProduct(u.transpose() * v);
    estimate = v.dot(w);  // Rayleigh quotient of E at the current unit vector
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
  }
  return estimate;
}

double estimate_error_power(const LinearOperator& op, const NystromApproximation& approx,
                            Index q, Rng& rng) {
  return estimate_error_power(op, approx.u, approx.lambda, q, rng);
}

AdaptiveOutcome adaptive_nystrom(const LinearOperator& op, const AdaptiveConfig& config,
                                 Rng& rng) {
  if (config.tol_mode != TolMode::error)
    throw std::invalid_argument("adaptive_nystrom: config.tol_mode must be error");
  const double tol = config.resolved_tau() * config.mu;
  return doubling_loop(op, config, rng, [&](AdaptiveOutcome& outcome) {
    const double estimate = estimate_error_power(op, outcome.approximation, config.q, rng);
    outcome.error_estimate = estimate;
    if (estimate > tol) return false;
    return !config.secondary_criterion ||
           outcome.approximation.lambda_min() <= tol / 11.0;
  });
}

AdaptiveOutcome adaptive_nystrom_ratio(const LinearOperator& op,
                                       const AdaptiveConfig& config, Rng& rng) {
  if (config.tol_mode != TolMode::ratio)
    throw std::invalid_argument("adaptive_nystrom_ratio: config.tol_mode must be ratio");
  const double tau = config.resolved_tau();
  return doubling_loop(op, config, rng, [&](AdaptiveOutcome& outcome) {
    return outcome.approximation.lambda_min() <= tau * config.mu;
  });
}

AdaptiveOutcome fixed_rank_nystrom(const LinearOperator& op, const AdaptiveConfig& config,
                                   Rng& rng) {
  if (config.tol_mode != TolMode::fixed)
    throw std::invalid_argument("fixed_rank_nystrom: config.tol_mode must be fixed");
  validate_config(op, config);
  AdaptiveOutcome outcome;
  std::vector<Index> used;
  const SketchPair pair =
      grow(make_empty_sketch(op.dim()), op, config.ell_max, used, config, rng);
  outcome.approximation = nystrom_from_sketch(pair);
  outcome.error_estimate = estimate_error_power(op, outcome.approximation, config.q, rng);
  finalize(outcome, config.mu);
  return outcome;
}

double posterior_condition_estimate(double lambda_ell, double mu, double err_estimate) {
  if (!(mu > 0.0))
    throw std::invalid_argument("posterior_condition_estimate: mu must be > 0");
  if (lambda_ell < 0.0 || err_estimate < 0.0)
    throw std::invalid_argument("posterior_condition_estimate: inputs must be >= 0");
  return (lambda_ell + mu + err_estimate) / mu;
}

}  // namespace npcg
