#include "npcg/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "npcg/adaptive.hpp"
#include "npcg/diagnostics.hpp"
#include "npcg/preconditioner.hpp"
#include "npcg/solvers.hpp"

namespace npcg::bench {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Incremental 64-bit FNV-1a over the byte images of the hashed fields.
class Fnv1a {
 public:
  void bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      hash_ ^= p[i];
      hash_ *= 1099511628211ull;
    }
  }
  void add(const std::string& s) {
    bytes(s.data(), s.size());
    const char sep = '\0';
    bytes(&sep, 1);
  }
  void add(double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    add(bits);
  }
  void add(std::uint64_t v) { bytes(&v, sizeof(v)); }
  void add(Index v) { add(static_cast<std::uint64_t>(v)); }
  void add(int v) { add(static_cast<std::uint64_t>(v)); }
  void add(bool v) { add(static_cast<std::uint64_t>(v)); }
  void add(const Matrix& m) {
    add(m.rows());
    add(m.cols());
    for (Index j = 0; j < m.cols(); ++j)
      for (Index i = 0; i < m.rows(); ++i) add(m(i, j));
  }
  void add(const Vector& v) {
    add(v.size());
    for (Index i = 0; i < v.size(); ++i) add(v(i));
  }

  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  std::uint64_t hash_ = 1469598103934665603ull;
};

struct Problem {
  std::shared_ptr<const LinearOperator> op;
  double shift = 0.0;  // the literal mu in (A + mu I) x = b
  Index data_dim = 0;
};


Problem build_problem(const ProblemSpec& spec) {
  const int sources = static_cast<int>(spec.file.has_value()) +
                      static_cast<int>(spec.synthetic.has_value()) +
                      static_cast<int>(spec.ridge.has_value()) +
                      static_cast<int>(spec.krr.has_value());
  if (sources != 1)
    throw std::invalid_argument("run_benchmark: exactly one problem source required");
  if (spec.mu < 0.0) throw std::invalid_argument("run_benchmark: mu must be >= 0");

  Problem problem;
  problem.shift = spec.mu;
  if (spec.file) {
    Matrix m = io::require_symmetric(io::load_matrix(spec.file->path, spec.file->format),
                                     "run_benchmark");
    problem.data_dim = m.rows();
    problem.op = std::make_shared<DenseOperator>(std::move(m));
  } else if (spec.synthetic) {
    problem.data_dim = spec.synthetic->size();
    problem.op = std::make_shared<DenseOperator>(
        synthesize_operator(*spec.synthetic, synthetic_operator_seed(spec.seed)));
  } else if (spec.ridge) {
    problem.data_dim = spec.ridge->design.rows();
    problem.op = std::make_shared<GramRidgeOperator>(gram_ridge(spec.ridge->design));
  } else {
    problem.data_dim = spec.krr->points.cols();
    auto kernel = std::make_shared<KernelOperator>(
        gaussian_kernel(spec.krr->points, spec.krr->sigma));
    if (spec.krr->convention == RegularizerConvention::n_mu)
      problem.shift = spec.mu * static_cast<double>(kernel->dim());
    problem.op = std::move(kernel);
  }
  return problem;
}

Index resolve_fixed_rank(const ProblemSpec& spec, double shift, Index n) {
  if (spec.rank > 0) {
    if (spec.rank > n)
      throw std::invalid_argument("run_benchmark: rank exceeds problem dimension");
    return spec.rank;
  }
  if (spec.synthetic && shift > 0.0)
    return recommended_sketch_size(*spec.synthetic, shift);
  throw std::invalid_argument(
      "run_benchmark: fixed rank policy needs an explicit rank for this source");
}

AdaptiveConfig adaptive_config(const ProblemSpec& spec, double shift, Index n,
                               bool column_sampling) {
  AdaptiveConfig config;
  config.ell0 = spec.ell0;
  config.ell_max = spec.ell_max > 0 ? spec.ell_max : n;
  config.mu = shift;
  config.tol_mode =
      spec.policy == RankPolicy::adaptive_ratio ? TolMode::ratio : TolMode::error;
  config.tau = spec.tau;
  config.sketch = column_sampling ? SketchKind::column_sampling : SketchKind::gaussian;
  return config;
}

}  // namespace

std::string spec_hash(const ProblemSpec& spec) {
  Fnv1a fnv;
  fnv.add(spec.problem_id);
  if (spec.file) {
    fnv.add(std::string("file"));
    fnv.add(spec.file->path);
    fnv.add(static_cast<int>(spec.file->format));
  } else if (spec.synthetic) {
    fnv.add(std::string("synthetic"));
    fnv.add(spec.synthetic->eigenvalues);
  } else if (spec.ridge) {
    fnv.add(std::string("ridge"));
    fnv.add(spec.ridge->design);
  } else if (spec.krr) {
    fnv.add(std::string("krr"));
    fnv.add(spec.krr->points);
    fnv.add(spec.krr->sigma);
    fnv.add(static_cast<int>(spec.krr->convention));
  } else {
    fnv.add(std::string("none"));
  }
  fnv.add(static_cast<int>(spec.solver));
  fnv.add(static_cast<int>(spec.policy));
  fnv.add(spec.mu);
  fnv.add(spec.eta);
  fnv.add(spec.relative_tol);
  fnv.add(spec.max_iter);
  fnv.add(spec.rank);
  fnv.add(spec.ell0);
  fnv.add(spec.ell_max);
  fnv.add(spec.tau.has_value());
  if (spec.tau) fnv.add(*spec.tau);
  fnv.add(spec.rhs.has_value());
  if (spec.rhs) fnv.add(*spec.rhs);
  return fnv.hex();
}

std::uint64_t synthetic_operator_seed(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull;  // splitmix64 step
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

BenchRecord run_benchmark(const ProblemSpec& spec) {
  BenchRecord rec;
  rec.problem_id = spec.problem_id;
  rec.mu = spec.mu;
  rec.seed = spec.seed;
  rec.spec_hash = spec_hash(spec);

  try {
    const Problem problem = build_problem(spec);
    const LinearOperator& op = *problem.op;
    const Index n = op.dim();
    rec.n = n;
    rec.d = problem.data_dim;

    Rng rng(spec.seed);
    Vector b;
    if (spec.rhs) {
      if (spec.rhs->size() != n)
        throw std::invalid_argument("run_benchmark: right-hand side length mismatch");
      b = *spec.rhs;
    } else {
      b = gaussian_vector(rng, n);
    }

    SolveOptions options;
    options.eta = spec.eta;
    options.max_iter = spec.max_iter;
    options.relative = spec.relative_tol;

    const auto run_start = Clock::now();
    if (spec.solver == SolverKind::cg) {
      const RegularizedOperator op_mu(op, problem.shift);
      const auto solve_start = Clock::now();
      const SolveReport report = cg(op_mu, b, options);
      rec.times.solve = seconds_since(solve_start);
      rec.iterations = report.iterations;
      rec.residual = report.residual_history.back();
      rec.converged = report.converged;
    } else {
      // Sketch phase: construct the approximation per the rank policy.
      const auto sketch_start = Clock::now();
      NystromApproximation approx;
      if (spec.policy == RankPolicy::fixed) {
        const Index ell = resolve_fixed_rank(spec, problem.shift, n);
        approx = randomized_nystrom(op, ell, rng);
      } else {
        const AdaptiveConfig config =
            adaptive_config(spec, problem.shift, n, spec.krr.has_value());
        const AdaptiveOutcome outcome =
            spec.policy == RankPolicy::adaptive_ratio
                ? adaptive_nystrom_ratio(op, config, rng)
                : adaptive_nystrom(op, config, rng);
        approx = outcome.approximation;
        rec.error_estimate = outcome.error_estimate;
        rec.posterior_condition = outcome.posterior_condition_estimate;
      }
      rec.times.sketch = seconds_since(sketch_start);
      rec.ell_final = approx.size();

      if (spec.solver == SolverKind::sketch_and_solve) {
        const auto solve_start = Clock::now();
        const Vector x = woodbury_inverse_apply(approx.u, approx.lambda, problem.shift, b);
        rec.times.solve = seconds_since(solve_start);
        Vector r = b - op.matvec(x);
        r -= problem.shift * x;
        rec.residual = r.norm();
        rec.iterations = 0;
        rec.converged =
            rec.residual <= (spec.relative_tol ? spec.eta * b.norm() : spec.eta);
      } else {
        const auto precond_start = Clock::now();
        const NystromPreconditioner precond =
            build_preconditioner(approx, problem.shift);
        rec.times.precondition = seconds_since(precond_start);
        const auto solve_start = Clock::now();
        if (spec.solver == SolverKind::block_pcg) {
          const BlockSolveReport report =
              block_nystrom_pcg(op, b, problem.shift, precond, options);
          rec.times.solve = seconds_since(solve_start);
          rec.iterations = report.iterations;
          rec.residual = report.residual_history.front().back();
          rec.converged = report.converged.front();
        } else {
          const SolveReport report = nystrom_pcg(op, b, problem.shift, precond, options);
          rec.times.solve = seconds_since(solve_start);
          rec.iterations = report.iterations;
          rec.residual = report.residual_history.back();
          rec.converged = report.converged;
        }
      }
    }
    rec.times.total = seconds_since(run_start);
  } catch (const SolveDivergenceError& e) {
    rec.failure = e.what();
    rec.iterations = e.report.iterations;
    if (!e.report.residual_history.empty())
      rec.residual = e.report.residual_history.back();
    rec.converged = false;
  } catch (const std::exception& e) {
    rec.failure = e.what();
    rec.converged = false;
  }
  return rec;
}

std::vector<BenchRecord> run_benchmark_trials(const ProblemSpec& spec, Index trials) {
  if (trials < 1) throw std::invalid_argument("run_benchmark_trials: trials must be >= 1");
  int threads = 1;
  if (const char* env = std::getenv("NPCG_THREADS")) {
    threads = std::atoi(env);
    if (threads < 1) threads = 1;
  }
  threads = static_cast<int>(std::min<Index>(threads, trials));

  std::vector<BenchRecord> records(static_cast<std::size_t>(trials));
  const auto run_trial = [&](Index index) {
    ProblemSpec trial = spec;
    trial.seed = spec.seed + static_cast<std::uint64_t>(index);
    records[static_cast<std::size_t>(index)] = run_benchmark(trial);
  };

  if (threads == 1) {
    for (Index i = 0; i < trials; ++i) run_trial(i);
    return records;
  }
  std::atomic<Index> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (Index i = next.fetch_add(1); i < trials; i = next.fetch_add(1)) run_trial(i);
    });
  for (auto& worker : pool) worker.join();
  return records;
}

std::string BenchRecord::json_line() const {
  json j;
  j["problem_id"] = problem_id;
  j["n"] = n;
  j["d"] = d;
  j["mu"] = mu;
  j["ell_final"] = ell_final;
  j["iterations"] = iterations;
  j["sketch_time"] = times.sketch;
  j["precondition_time"] = times.precondition;
  j["solve_time"] = times.solve;
  j["total_time"] = times.total;
  j["residual"] = residual;
  if (error_estimate) j["error_estimate"] = *error_estimate;
  if (posterior_condition) j["posterior_condition"] = *posterior_condition;
  j["converged"] = converged;
  if (!failure.empty()) j["failure"] = failure;
  j["seed"] = seed;
  j["spec_hash"] = spec_hash;
  return j.dump();
}

std::string summarize(const std::vector<BenchRecord>& records) {
  const auto stats = [&](auto&& get) {
    double mean = 0.0;
    Index count = 0;
    for (const auto& rec : records) {
      const std::optional<double> v = get(rec);
      if (!v) continue;
      mean += *v;
      ++count;
    }
    json j;
    if (count == 0) return j;  // null
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (const auto& rec : records) {
      const std::optional<double> v = get(rec);
      if (v) var += (*v - mean) * (*v - mean);
    }
    const double std_dev = count > 1 ? std::sqrt(var / static_cast<double>(count - 1)) : 0.0;
    j["mean"] = mean;
    j["std"] = std_dev;
    return j;
  };

  json j;
  j["trials"] = records.size();
  Index converged = 0, failed = 0;
  for (const auto& rec : records) {
    converged += rec.converged ? 1 : 0;
    failed += rec.failure.empty() ? 0 : 1;
  }
  j["converged"] = converged;
  j["failures"] = failed;
  j["iterations"] = stats([](const BenchRecord& r) -> std::optional<double> {
    return static_cast<double>(r.iterations);
  });
  j["ell_final"] = stats([](const BenchRecord& r) -> std::optional<double> {
    return static_cast<double>(r.ell_final);
  });
  j["residual"] = stats(
      [](const BenchRecord& r) -> std::optional<double> { return r.residual; });
  j["solve_time"] = stats(
      [](const BenchRecord& r) -> std::optional<double> { return r.times.solve; });
  j["total_time"] = stats(
      [](const BenchRecord& r) -> std::optional<double> { return r.times.total; });
  j["posterior_condition"] = stats(
      [](const BenchRecord& r) -> std::optional<double> { return r.posterior_condition; });
  return j.dump();
}

Matrix random_features(const Matrix& x, Index m_rf, double sigma, Rng& rng) {
  if (m_rf < 1) throw std::invalid_argument("random_features: m_rf must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("random_features: sigma must be > 0");
  const Index d = x.cols();
  // W ~ N(0, 1/sigma^2) entrywise, then the phase shifts; fixed draw order
  // keeps the map deterministic in the rng state.
  Matrix w = gaussian_matrix(rng, d, m_rf) / sigma;
  Vector phase(m_rf);
  for (Index i = 0; i < m_rf; ++i) phase(i) = 2.0 * M_PI * rng.uniform();
  Matrix z = x * w;
  z.rowwise() += phase.transpose();
  return std::sqrt(2.0 / static_cast<double>(m_rf)) * z.array().cos().matrix();
}

}  // namespace npcg::bench
