#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "npcg/matrix_io.hpp"
#include "npcg/operators.hpp"
#include "npcg/random.hpp"
#include "npcg/types.hpp"

namespace npcg::bench {

enum class SolverKind { cg, nystrom_pcg, sketch_and_solve, block_pcg };
enum class RankPolicy { fixed, adaptive_error, adaptive_ratio };

/// How a kernel problem interprets --mu: literal shift mu, or n*mu per the
/// KRR normal equations (K + n mu I) alpha = b.  Default n-mu.
enum class RegularizerConvention { mu, n_mu };

struct FileSource {
  std::string path;
  io::MatrixFormat format = io::MatrixFormat::matrix_market;
};

struct RidgeSource {
  Matrix design;  // G, n_rows-by-d; operator is (1/n_rows) G^T G
};

struct KrrSource {
  Matrix points;  // one row per input point
  double sigma = 1.0;
  RegularizerConvention convention = RegularizerConvention::n_mu;
};

/**
 * @brief Everything needed to run (and re-run) one benchmark problem.
 *
 * Exactly one source must be set.  The seed determines the test matrices,
 * the right-hand side when none is supplied, and the per-trial seeds of a
 * multi-trial run (seed + trial index).
 */
struct ProblemSpec {
  std::string problem_id = "problem";
  std::optional<FileSource> file;
  std::optional<SpectrumProfile> synthetic;
  std::optional<RidgeSource> ridge;
  std::optional<KrrSource> krr;

  SolverKind solver = SolverKind::nystrom_pcg;
  RankPolicy policy = RankPolicy::fixed;
  double mu = 0.0;
  double eta = 1e-10;
  bool relative_tol = false;
  Index max_iter = 500;
  Index rank = 0;       // fixed policy: the sketch size; 0 = use the d_eff rule when available
  Index ell0 = 10;      // adaptive policies
  Index ell_max = 0;    // adaptive policies; 0 = dim
  std::optional<double> tau;
  std::optional<Vector> rhs;
  std::uint64_t seed = 0;
};

/// Wall-clock seconds per phase; the sum tracks total to within 5%.
struct PhaseTimes {
  double sketch = 0.0;
  double precondition = 0.0;
  double solve = 0.0;
  double total = 0.0;
};

/// @brief One trial's metrics, serializable as a JSON line.
struct BenchRecord {
  std::string problem_id;
  Index n = 0;  // operator dimension
  Index d = 0;  // data dimension (ridge/krr), otherwise n
  double mu = 0.0;
  Index ell_final = 0;
  Index iterations = 0;
  PhaseTimes times;
  double residual = 0.0;
  std::optional<double> error_estimate;
  std::optional<double> posterior_condition;
  bool converged = false;
  std::string failure;  // non-empty when the solver failed; never thrown
  std::uint64_t seed = 0;
  std::string spec_hash;

  std::string json_line() const;
};

/// Deterministic FNV-1a hash of the spec's reproducibility-relevant fields.
std::string spec_hash(const ProblemSpec& spec);

/// Seed used to synthesize the operator of a synthetic problem (splitmix64
/// of the spec seed).  Synthesis must not share a generator stream with the
/// right-hand side and sketch draws, which also start at Rng(seed): the
/// first synthesis QR column equals the first n Gaussian draws, so an
/// undecorrelated b would be an exact eigenvector of A.
std::uint64_t synthetic_operator_seed(std::uint64_t seed);

/// Executes the configured pipeline end to end; solver failures are recorded
/// in the result, not thrown.
BenchRecord run_benchmark(const ProblemSpec& spec);

/// Repeated trials with per-trial seeds seed + 0, ..., seed + trials-1.
/// Trials run in parallel up to NPCG_THREADS (default 1); records are
/// ordered by trial index regardless of completion order.
std::vector<BenchRecord> run_benchmark_trials(const ProblemSpec& spec, Index trials);

/// Aggregate JSON summary (mean and standard deviation per numeric metric).
std::string summarize(const std::vector<BenchRecord>& records);

/**
 * @brief Gaussian random features for the kernel exp(-||x-y||^2/(2 sigma^2)):
 * sqrt(2/m_rf) cos(X W + 1 b^T) with W entries N(0, 1/sigma^2) and b uniform
 * on [0, 2 pi).  Feeds gram_ridge.
 */
Matrix random_features(const Matrix& x, Index m_rf, double sigma, Rng& rng);

}  // namespace npcg::bench
