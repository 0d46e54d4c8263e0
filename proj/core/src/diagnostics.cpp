#include "npcg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "npcg/dense.hpp"

namespace npcg {

double effective_dimension(const SpectrumProfile& profile, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("effective_dimension: mu must be > 0");
  const auto& lam = profile.eigenvalues;
  double sum = 0.0;
  for (Index j = 0; j < lam.size(); ++j) sum += lam(j) / (lam(j) + mu);
  return sum;
}

double p_stable_rank(const SpectrumProfile& profile, Index p) {
  const Index n = profile.size();
  if (p < 1 || p > n) throw std::invalid_argument("p_stable_rank: need 1 <= p <= n");
  const auto& lam = profile.eigenvalues;
  if (!(lam(p - 1) > 0.0))
    throw std::invalid_argument("p_stable_rank: lambda_p must be positive");
  double tail = 0.0;  // inclusive: sum_{j >= p}
  for (Index j = p - 1; j < n; ++j) tail += lam(j);
  return tail / lam(p - 1);
}

Index recommended_sketch_size(const SpectrumProfile& profile, double mu) {
  const double deff = effective_dimension(profile, mu);
  const Index ell = 2 * static_cast<Index>(std::ceil(1.5 * deff)) + 1;
  return std::min(ell, profile.size());
}

ConditionBounds condition_bounds(double lambda_ell, double mu, double err_norm,
                                 double lambda_n) {
  if (lambda_ell < 0.0 || mu < 0.0 || err_norm < 0.0 || lambda_n < 0.0)
    throw std::invalid_argument("condition_bounds: inputs must be >= 0");
  if (!(mu + lambda_n > 0.0))
    throw std::invalid_argument("condition_bounds: mu + lambda_n must be > 0");

  ConditionBounds out;
  out.lambda_ell = lambda_ell;
  out.mu = mu;
  out.err_norm = err_norm;
  out.lambda_n = lambda_n;
  out.lower = std::max((lambda_ell + mu) / (lambda_n + mu), 1.0);

  double factor = std::numeric_limits<double>::infinity();
  if (mu > 0.0) factor = 1.0 / mu;
  if (lambda_ell + mu > 0.0)
    factor = std::min(factor,
                      (lambda_ell + lambda_n + 2.0 * mu) /
                          ((lambda_ell + mu) * (lambda_n + mu)));
  if (!std::isfinite(factor))
    throw std::invalid_argument("condition_bounds: both upper-bound branches undefined");
  out.upper = (lambda_ell + mu + err_norm) * factor;
  return out;
}

namespace {

double condition_of(const Matrix& preconditioner, const Matrix& a_mu) {
  const Index n = a_mu.rows();
  if (a_mu.cols() != n)
    throw std::invalid_argument("exact_condition_number: matrix must be square");
  if (n > 2000)
    throw std::invalid_argument("exact_condition_number: oracle capped at n = 2000");
  if (preconditioner.rows() != n)
    throw std::invalid_argument("exact_condition_number: dimension mismatch");

  const Matrix inv_sqrt = dense::sym_sqrt_inverse(preconditioner);  // rejects non-pd
  Matrix m = inv_sqrt * a_mu * inv_sqrt;
  m = ((m + m.transpose()) / 2.0).eval();
  const Vector eig = dense::sym_eigenvalues(m);
  const double lo = eig(n - 1);
  if (!(lo > 0.0))
    throw std::runtime_error("exact_condition_number: preconditioned matrix not pd");
  return eig(0) / lo;
}

}  // namespace

double exact_condition_number(const NystromPreconditioner& p, const Matrix& a_mu) {
  return condition_of(p.materialize(), a_mu);
}

double exact_condition_number(const OptimalPreconditioner& p, const Matrix& a_mu) {
  return condition_of(p.materialize(), a_mu);
}

LemmaCheckResult key_lemma_check(const SpectrumProfile& profile, double mu, double gamma) {
  if (!(mu > 0.0)) throw std::invalid_argument("key_lemma_check: mu must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("key_lemma_check: gamma must be > 0");
  const auto& lam = profile.eigenvalues;
  const Index n = profile.size();
  const double deff = effective_dimension(profile, mu);

  LemmaCheckResult result;
  const double j_threshold = (1.0 + 1.0 / gamma) * deff;
  for (Index j = 1; j <= n; ++j) {
    if (static_cast<double>(j) < j_threshold) continue;
    if (lam(j - 1) > gamma * mu) {
      result.ok = false;
      result.item = 1;
      result.index = j;
      result.lhs = lam(j - 1);
      result.rhs = gamma * mu;
      return result;
    }
  }

  Vector suffix = Vector::Zero(n + 1);  // suffix(k) = sum_{j > k} lambda_j, 1-based k
  for (Index j = n - 1; j >= 0; --j) suffix(j) = suffix(j + 1) + lam(j);
  for (Index k = 1; k <= n; ++k) {
    if (static_cast<double>(k) < deff) continue;
    const double lhs = suffix(k) / static_cast<double>(k);
    const double rhs = deff * mu / static_cast<double>(k);
    if (lhs > rhs) {
      result.ok = false;
      result.item = 2;
      result.index = k;
      result.lhs = lhs;
      result.rhs = rhs;
      return result;
    }
  }
  return result;
}

}  // namespace npcg
