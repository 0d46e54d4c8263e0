#pragma once

#include <cmath>
#include <cstdint>

#include <npcg/npcg.hpp>

/// Shared helpers for the unit and acceptance suites.  Everything here is
/// deliberately naive (dense, eigendecomposition-based) so it can serve as an
/// independent oracle for the library code under test.
namespace npcg::test {

/// Random symmetric psd matrix with the prescribed eigenvalues (descending
/// order not required; the matrix only cares about the multiset).
inline Matrix psd_from_spectrum(const Vector& lambdas, Rng& rng) {
  const Matrix q = random_orthogonal(rng, lambdas.size());
  Matrix a = q * lambdas.asDiagonal() * q.transpose();
  a = ((a + a.transpose()) / 2.0).eval();
  return a;
}

/// lambda_j = j^(-power), j = 1..n.
inline Vector poly_spectrum(Index n, double power) {
  Vector lam(n);
  for (Index j = 0; j < n; ++j) lam(j) = std::pow(static_cast<double>(j + 1), -power);
  return lam;
}

/// lambda_j = base^j, j = 1..n (0 < base < 1 gives geometric decay).
inline Vector geo_spectrum(Index n, double base) {
  Vector lam(n);
  double v = base;
  for (Index j = 0; j < n; ++j, v *= base) lam(j) = v;
  return lam;
}

/// n log-equispaced values from 10^hi down to 10^lo.
inline Vector logspace_spectrum(Index n, double hi, double lo) {
  Vector lam(n);
  if (n == 1) {
    lam(0) = std::pow(10.0, hi);
    return lam;
  }
  for (Index j = 0; j < n; ++j)
    lam(j) = std::pow(10.0, hi + (lo - hi) * static_cast<double>(j) /
                                static_cast<double>(n - 1));
  return lam;
}

/// Random psd matrix with log-uniform eigenvalues in [1/cond, 1].
inline Matrix random_psd(Rng& rng, Index n, double cond = 1.0e3) {
  Vector lam(n);
  const double lo = -std::log10(cond);
  for (Index j = 0; j < n; ++j) lam(j) = std::pow(10.0, lo * rng.uniform());
  return psd_from_spectrum(lam, rng);
}

inline double rel_diff(const Vector& x, const Vector& y) {
  const double scale = y.norm();
  return scale > 0.0 ? (x - y).norm() / scale : (x - y).norm();
}

inline double rel_diff(const Matrix& x, const Matrix& y) {
  const double scale = y.norm();
  return scale > 0.0 ? (x - y).norm() / scale : (x - y).norm();
}

inline double min_eigenvalue(const Matrix& a) {
  return dense::sym_eigenvalues(a).minCoeff();
}

/// ||v||_M with M spd (dense oracle for energy-norm error checks).
inline double energy_norm(const Matrix& m, const Vector& v) {
  return std::sqrt(v.dot(m * v));
}

}  // namespace npcg::test
