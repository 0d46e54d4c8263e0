#include "npcg/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "npcg/dense.hpp"

namespace npcg {

double Rng::normal() {
  // Box-Muller with the sine partner discarded: exactly two engine words per
  // deviate, so block draws of any shape consume the stream identically.
  const double u1 =
      (static_cast<double>(engine_()) + 1.0) * 0x1.0p-64;  // (0, 1]
  const double u2 = static_cast<double>(engine_()) * 0x1.0p-64;  // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::uniform() { return static_cast<double>(engine_()) * 0x1.0p-64; }

std::uint64_t Rng::integer(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng - integer: bound must be positive");
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
}

Matrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.normal();
  return g;
}

Vector gaussian_vector(Rng& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

Matrix random_orthogonal(Rng& rng, Index n) {
  return dense::orthonormal_columns(gaussian_matrix(rng, n, n));
}

std::vector<Index> sample_without_replacement(Rng& rng, Index n, Index k) {
  if (k < 0 || k > n)
    throw std::invalid_argument("sample_without_replacement: need 0 <= k <= n");
  std::vector<Index> pool(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  // Partial Fisher-Yates: the first k slots end up holding the sample.
  for (Index i = 0; i < k; ++i) {
    const Index j = i + static_cast<Index>(rng.integer(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

}  // namespace npcg
