#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "npcg/types.hpp"

namespace npcg {

/**
 * @brief Deterministic random source used throughout the library.
 *
 * All randomness flows through explicitly seeded generators; there is no
 * global RNG state anywhere.  Normal deviates come from a cache-free
 * Box-Muller transform (two engine words per deviate, the sine partner is
 * discarded), so the stream position after drawing an n-by-a block equals
 * the position after the first a columns of an n-by-(a+b) draw.  Sketch
 * extension and benchmark replay rely on that alignment.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Standard normal deviate (Box-Muller, no internal caching).
  double normal();

  /// Uniform deviate in [0, 1).
  double uniform();

  /// Uniform integer in [0, bound).
  std::uint64_t integer(std::uint64_t bound);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// n-by-cols matrix of iid standard normals, filled column by column.
Matrix gaussian_matrix(Rng& rng, Index rows, Index cols);

/// Standard normal vector of length n.
Vector gaussian_vector(Rng& rng, Index n);

/// Haar-ish random orthogonal matrix: thin QR of a square Gaussian draw.
Matrix random_orthogonal(Rng& rng, Index n);

/// k distinct indices drawn uniformly without replacement from {0,...,n-1}.
std::vector<Index> sample_without_replacement(Rng& rng, Index n, Index k);

}  // namespace npcg
