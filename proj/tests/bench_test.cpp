#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/test_support.hpp"

using namespace npcg;
using bench::BenchRecord;
using bench::ProblemSpec;

namespace {

ProblemSpec synthetic_spec(Vector eigenvalues, double mu) {
  ProblemSpec spec;
  spec.synthetic = SpectrumProfile(std::move(eigenvalues));
  spec.mu = mu;
  return spec;
}

void check_same_run(const BenchRecord& a, const BenchRecord& b) {
  CHECK(a.problem_id == b.problem_id);
  CHECK(a.n == b.n);
  CHECK(a.d == b.d);
  CHECK(a.mu == b.mu);
  CHECK(a.ell_final == b.ell_final);
  CHECK(a.iterations == b.iterations);
  CHECK(a.residual == b.residual);
  CHECK(a.error_estimate.has_value() == b.error_estimate.has_value());
  if (a.error_estimate) CHECK(*a.error_estimate == *b.error_estimate);
  CHECK(a.converged == b.converged);
  CHECK(a.failure == b.failure);
  CHECK(a.seed == b.seed);
  CHECK(a.spec_hash == b.spec_hash);
}

}  // namespace

TEST_CASE("cg on an identity system converges in one iteration") {
  ProblemSpec spec = synthetic_spec(Vector::Ones(20), 0.0);
  spec.solver = bench::SolverKind::cg;
  spec.seed = 7;
  const BenchRecord rec = bench::run_benchmark(spec);
  CHECK(rec.failure.empty());
  CHECK(rec.converged);
  CHECK(rec.iterations == 1);
  CHECK(rec.residual <= spec.eta);
  CHECK(rec.n == 20);
  CHECK(rec.d == 20);
  CHECK(rec.ell_final == 0);
}

TEST_CASE("generated right-hand sides are not eigenvectors of the operator") {
  // The synthesis stream is decorrelated from the rhs stream; if both started
  // at Rng(seed), b would equal the first QR column of the synthesis draw and
  // every synthetic solve would finish in one iteration.
  Vector lam(60);
  for (Index j = 0; j < 60; ++j) lam(j) = std::pow(0.9, static_cast<double>(j + 1));
  ProblemSpec spec = synthetic_spec(lam, 1e-4);
  spec.solver = bench::SolverKind::cg;
  spec.eta = 1e-8;
  spec.relative_tol = true;
  for (std::uint64_t seed : {0ull, 1ull, 42ull}) {
    spec.seed = seed;
    const BenchRecord rec = bench::run_benchmark(spec);
    CHECK(rec.failure.empty());
    CHECK(rec.iterations > 5);
  }
}

TEST_CASE("adaptive-error pipeline records the stopping evidence") {
  ProblemSpec spec = synthetic_spec(test::poly_spectrum(500, 2.0), 1e-4);
  spec.solver = bench::SolverKind::nystrom_pcg;
  spec.policy = bench::RankPolicy::adaptive_error;
  spec.eta = 1e-8;
  spec.relative_tol = true;
  spec.seed = 3;
  const BenchRecord rec = bench::run_benchmark(spec);
  CHECK(rec.failure.empty());
  CHECK(rec.converged);
  CHECK(rec.ell_final > 0);
  REQUIRE(rec.error_estimate.has_value());
  CHECK(*rec.error_estimate <= 30.0 * spec.mu * (1.0 + 1e-12));
  REQUIRE(rec.posterior_condition.has_value());
  CHECK(*rec.posterior_condition >= 1.0);
  CHECK(rec.iterations > 0);
  CHECK(rec.iterations < spec.max_iter);
}

TEST_CASE("fixed seed reproduces every field except wall time") {
  ProblemSpec spec = synthetic_spec(test::poly_spectrum(100, 2.0), 1e-3);
  spec.policy = bench::RankPolicy::adaptive_error;
  spec.ell0 = 5;
  spec.seed = 19;
  const BenchRecord a = bench::run_benchmark(spec);
  const BenchRecord b = bench::run_benchmark(spec);
  check_same_run(a, b);
}

TEST_CASE("spec hash tracks the configuration, not the seed") {
  ProblemSpec a = synthetic_spec(Vector::Ones(5), 0.5);
  ProblemSpec b = a;
  b.seed = 999;
  CHECK(bench::spec_hash(a) == bench::spec_hash(b));

  ProblemSpec c = a;
  c.mu = 0.25;
  CHECK(bench::spec_hash(a) != bench::spec_hash(c));
  ProblemSpec d = a;
  d.problem_id = "other";
  CHECK(bench::spec_hash(a) != bench::spec_hash(d));
  ProblemSpec e = a;
  e.max_iter = 321;
  CHECK(bench::spec_hash(a) != bench::spec_hash(e));
}

TEST_CASE("trials use per-trial seeds in index order") {
  ProblemSpec spec = synthetic_spec(test::geo_spectrum(40, 0.6), 1e-2);
  spec.rank = 8;
  spec.seed = 100;
  const std::vector<BenchRecord> records = bench::run_benchmark_trials(spec, 4);
  REQUIRE(records.size() == 4);
  for (Index i = 0; i < 4; ++i) {
    CHECK(records[static_cast<std::size_t>(i)].seed ==
          100 + static_cast<std::uint64_t>(i));
    ProblemSpec single = spec;
    single.seed = 100 + static_cast<std::uint64_t>(i);
    check_same_run(records[static_cast<std::size_t>(i)], bench::run_benchmark(single));
  }

  SUBCASE("parallel execution yields identical records") {
    setenv("NPCG_THREADS", "3", 1);
    const std::vector<BenchRecord> parallel = bench::run_benchmark_trials(spec, 4);
    unsetenv("NPCG_THREADS");
    REQUIRE(parallel.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) check_same_run(records[i], parallel[i]);
  }
}

TEST_CASE("summarize reports mean and standard deviation") {
  BenchRecord a, b;
  a.iterations = 10;
  a.residual = 1e-3;
  a.converged = true;
  b.iterations = 20;
  b.residual = 3e-3;
  b.converged = false;
  b.failure = "diverged";
  const nlohmann::json j = nlohmann::json::parse(bench::summarize({a, b}));
  CHECK(j["trials"] == 2);
  CHECK(j["converged"] == 1);
  CHECK(j["failures"] == 1);
  CHECK(j["iterations"]["mean"] == 15.0);
  CHECK(j["iterations"]["std"] ==
        doctest::Approx(std::sqrt(50.0)).epsilon(1e-14));
  CHECK(j["residual"]["mean"] == doctest::Approx(2e-3).epsilon(1e-14));
  CHECK(j["posterior_condition"].is_null());
}

TEST_CASE("records serialize to parseable json lines") {
  ProblemSpec spec = synthetic_spec(Vector::Ones(6), 1.0);
  spec.rank = 3;
  const BenchRecord rec = bench::run_benchmark(spec);
  const nlohmann::json j = nlohmann::json::parse(rec.json_line());
  CHECK(j["n"] == 6);
  CHECK(j["mu"] == 1.0);
  CHECK(j["ell_final"] == 3);
  CHECK(j["seed"] == 0);
  CHECK(j["spec_hash"] == rec.spec_hash);
  CHECK(j["total_time"].get<double>() >= 0.0);
}

TEST_CASE("solver failure is recorded, not thrown") {
  const auto dir = std::filesystem::temp_directory_path() / "npcg_bench_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "negdef.csv").string();
  io::save_matrix(path, -Matrix::Identity(3, 3), io::MatrixFormat::csv_dense);

  ProblemSpec spec;
  spec.file = bench::FileSource{path, io::MatrixFormat::csv_dense};
  spec.solver = bench::SolverKind::cg;
  spec.mu = 0.0;
  const BenchRecord rec = bench::run_benchmark(spec);
  CHECK_FALSE(rec.converged);
  CHECK_FALSE(rec.failure.empty());
}

TEST_CASE("invalid specs surface as recorded failures") {
  ProblemSpec empty;
  const BenchRecord rec = bench::run_benchmark(empty);
  CHECK_FALSE(rec.failure.empty());

  ProblemSpec no_rank;
  no_rank.file = bench::FileSource{"unused.csv", io::MatrixFormat::csv_dense};
  no_rank.rank = 0;
  const BenchRecord rec2 = bench::run_benchmark(no_rank);
  CHECK_FALSE(rec2.failure.empty());
}

TEST_CASE("rank zero on a synthetic source applies the d_eff rule") {
  ProblemSpec spec = synthetic_spec(Vector::Ones(10), 1.0);
  spec.solver = bench::SolverKind::nystrom_pcg;
  spec.rank = 0;  // recommended size 17 clamps to n = 10
  const BenchRecord rec = bench::run_benchmark(spec);
  CHECK(rec.failure.empty());
  CHECK(rec.ell_final == 10);
}

TEST_CASE("krr n-mu convention matches an explicit literal shift") {
  Rng rng(23);
  ProblemSpec krr;
  krr.krr = bench::KrrSource{gaussian_matrix(rng, 40, 2), 1.0,
                             bench::RegularizerConvention::n_mu};
  krr.mu = 1e-3;
  krr.rank = 10;
  krr.seed = 5;

  ProblemSpec literal = krr;
  literal.krr->convention = bench::RegularizerConvention::mu;
  literal.mu = 40.0 * 1e-3;

  const BenchRecord a = bench::run_benchmark(krr);
  const BenchRecord c = bench::run_benchmark(literal);
  CHECK(a.failure.empty());
  CHECK(a.iterations == c.iterations);
  CHECK(a.residual == c.residual);
  CHECK(a.d == 2);
  CHECK(a.n == 40);
  CHECK(bench::spec_hash(krr) != bench::spec_hash(literal));
}

TEST_CASE("sketch-and-solve and block solvers run end to end") {
  ProblemSpec sas = synthetic_spec(test::geo_spectrum(30, 0.3), 1e-2);
  sas.solver = bench::SolverKind::sketch_and_solve;
  sas.rank = 15;
  sas.eta = 1e-2;
  const BenchRecord rec = bench::run_benchmark(sas);
  CHECK(rec.failure.empty());
  CHECK(rec.iterations == 0);
  CHECK(rec.residual < 1e-2);

  ProblemSpec blk = synthetic_spec(test::geo_spectrum(30, 0.3), 1e-2);
  blk.solver = bench::SolverKind::block_pcg;
  blk.rank = 10;
  const BenchRecord brec = bench::run_benchmark(blk);
  CHECK(brec.failure.empty());
  CHECK(brec.converged);
  CHECK(brec.residual <= blk.eta);
}

TEST_CASE("phase times account for the total wall time") {
  ProblemSpec spec = synthetic_spec(test::poly_spectrum(600, 1.0), 1e-3);
  spec.solver = bench::SolverKind::nystrom_pcg;
  spec.rank = 100;
  spec.eta = 1e-8;
  spec.relative_tol = true;
  const BenchRecord rec = bench::run_benchmark(spec);
  REQUIRE(rec.failure.empty());
  REQUIRE(rec.times.total > 0.0);
  CHECK(rec.times.sketch >= 0.0);
  CHECK(rec.times.precondition >= 0.0);
  CHECK(rec.times.solve >= 0.0);
  const double sum = rec.times.sketch + rec.times.precondition + rec.times.solve;
  CHECK(std::abs(sum - rec.times.total) <= 0.05 * rec.times.total);
}

TEST_CASE("random features approximate the gaussian kernel") {
  Rng rng(31);
  const Index n = 60;
  const Matrix x = gaussian_matrix(rng, n, 5);
  const double sigma = 1.5;

  SUBCASE("shape and range") {
    Rng local(1);
    const Index m_rf = 32;
    const Matrix z = bench::random_features(x, m_rf, sigma, local);
    CHECK(z.rows() == n);
    CHECK(z.cols() == m_rf);
    CHECK(z.cwiseAbs().maxCoeff() <= std::sqrt(2.0 / static_cast<double>(m_rf)));
  }
  SUBCASE("determinism") {
    Rng r1(4), r2(4), r3(5);
    const Matrix z1 = bench::random_features(x, 16, sigma, r1);
    CHECK(bench::random_features(x, 16, sigma, r2) == z1);
    CHECK(bench::random_features(x, 16, sigma, r3) != z1);
  }
  SUBCASE("Monte-Carlo kernel approximation") {
    Rng local(2);
    const Index m_rf = 4096;
    const Matrix z = bench::random_features(x, m_rf, sigma, local);
    const Matrix k = dense::materialize(gaussian_kernel(x, sigma));
    double dev = 0.0;
    for (int pair = 0; pair < 50; ++pair) {
      const Index i = static_cast<Index>(local.integer(static_cast<std::uint64_t>(n)));
      const Index j = static_cast<Index>(local.integer(static_cast<std::uint64_t>(n)));
      dev += std::abs(z.row(i).dot(z.row(j)) - k(i, j));
    }
    dev /= 50.0;
    CHECK(dev <= 3.0 / std::sqrt(static_cast<double>(m_rf)));
  }
  SUBCASE("parameter validation") {
    Rng local(3);
    CHECK_THROWS_AS(bench::random_features(x, 0, sigma, local), std::invalid_argument);
    CHECK_THROWS_AS(bench::random_features(x, 8, 0.0, local), std::invalid_argument);
  }
}
