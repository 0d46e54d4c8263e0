// npcg command-line front end: solve, approx, adaptive, deff, and bench
// subcommands over matrix files or synthetic spectra, emitting JSON lines.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <npcg/npcg.hpp>

namespace {

using nlohmann::json;
using namespace npcg;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

/// Flags shared by every subcommand that builds a problem.
struct CommonArgs {
  std::string matrix;
  std::string format = "matrix-market";
  std::string synthetic;
  std::string ridge;
  std::string krr;
  std::string rhs;
  std::string out;
  std::string convention = "n-mu";
  double mu = 0.0;
  double sigma = 1.0;
  double tol = 1e-10;
  bool relative_tol = false;
  std::int64_t rank = 0;
  std::int64_t ell0 = 10;
  std::int64_t ell_max = 0;
  std::int64_t max_iter = 500;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  std::optional<double> tau;
  std::string policy = "fixed";
  std::string solver = "nystrom-pcg";
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--matrix", args.matrix, "Symmetric matrix file");
  cmd->add_option("--format", args.format, "File format")
      ->check(CLI::IsMember({"matrix-market", "csv-dense", "raw-f64"}));
  cmd->add_option("--synthetic", args.synthetic,
                  "Synthetic spectrum: ones:N | poly:N:P | geo:N:B | "
                  "logspace:N:HI:LO | file:PATH");
  cmd->add_option("--ridge", args.ridge, "Design matrix for (1/rows) G^T G");
  cmd->add_option("--krr", args.krr, "Data points for a Gaussian kernel system");
  cmd->add_option("--sigma", args.sigma, "Kernel bandwidth (krr)");
  cmd->add_option("--regularizer-convention", args.convention,
                  "Kernel shift interpretation of --mu")
      ->check(CLI::IsMember({"mu", "n-mu"}));
  cmd->add_option("--rhs", args.rhs, "Right-hand side file (single column)");
  cmd->add_option("--mu", args.mu, "Regularization parameter");
  cmd->add_option("--rank", args.rank, "Sketch size (fixed policy; 0 = d_eff rule)");
  cmd->add_option("--tol", args.tol, "Residual tolerance eta");
  cmd->add_flag("--relative", args.relative_tol, "Scale eta by ||b||");
  cmd->add_option("--max-iter", args.max_iter, "Iteration cap");
  cmd->add_option("--seed", args.seed, "Random seed");
  cmd->add_option("--policy", args.policy, "Rank policy")
      ->check(CLI::IsMember({"fixed", "adaptive-error", "adaptive-ratio"}));
  cmd->add_option("--ell0", args.ell0, "Initial sketch size (adaptive)");
  cmd->add_option("--ell-max", args.ell_max, "Sketch size cap (adaptive; 0 = n)");
  cmd->add_option("--tau", args.tau, "Adaptive stopping tolerance");
  cmd->add_option("--trials", args.trials, "Trial count (bench)");
  cmd->add_option("--out", args.out, "Write output here instead of stdout");
}

Vector parse_synthetic_spectrum(const std::string& text) {
  std::vector<std::string> parts;
  std::istringstream in(text);
  std::string piece;
  while (std::getline(in, piece, ':')) parts.push_back(piece);
  if (parts.empty()) throw std::invalid_argument("--synthetic: empty spec");

  const auto num = [&](std::size_t i) { return std::stod(parts.at(i)); };
  const auto dim = [&](std::size_t i) {
    const long n = std::stol(parts.at(i));
    if (n < 1) throw std::invalid_argument("--synthetic: dimension must be >= 1");
    return static_cast<Index>(n);
  };

  if (parts[0] == "file") {
    if (parts.size() != 2) throw std::invalid_argument("--synthetic: file:PATH");
    return io::load_vector(parts[1], io::MatrixFormat::csv_dense);
  }
  if (parts[0] == "ones") {
    if (parts.size() != 2) throw std::invalid_argument("--synthetic: ones:N");
    return Vector::Ones(dim(1));
  }
  if (parts[0] == "poly") {
    if (parts.size() != 3) throw std::invalid_argument("--synthetic: poly:N:P");
    const Index n = dim(1);
    const double p = num(2);
    Vector lam(n);
    for (Index j = 0; j < n; ++j) lam(j) = std::pow(static_cast<double>(j + 1), -p);
    return lam;
  }
  if (parts[0] == "geo") {
    if (parts.size() != 3) throw std::invalid_argument("--synthetic: geo:N:B");
    const Index n = dim(1);
    const double base = num(2);
    Vector lam(n);
    double v = base;
    for (Index j = 0; j < n; ++j, v *= base) lam(j) = v;
    return lam;
  }
  if (parts[0] == "logspace") {
    if (parts.size() != 4) throw std::invalid_argument("--synthetic: logspace:N:HI:LO");
    const Index n = dim(1);
    const double hi = num(2), lo = num(3);
    Vector lam(n);
    for (Index j = 0; j < n; ++j)
      lam(j) = std::pow(10.0, n == 1 ? hi
                                     : hi + (lo - hi) * static_cast<double>(j) /
                                               static_cast<double>(n - 1));
    return lam;
  }
  throw std::invalid_argument("--synthetic: unknown kind '" + parts[0] + "'");
}

bench::ProblemSpec build_spec(const CommonArgs& args) {
  bench::ProblemSpec spec;
  if (!args.matrix.empty())
    spec.file = bench::FileSource{args.matrix, io::parse_format(args.format)};
  if (!args.synthetic.empty())
    spec.synthetic = SpectrumProfile(parse_synthetic_spectrum(args.synthetic));
  if (!args.ridge.empty())
    spec.ridge = bench::RidgeSource{
        io::load_matrix(args.ridge, io::parse_format(args.format))};
  if (!args.krr.empty())
    spec.krr = bench::KrrSource{
        io::load_matrix(args.krr, io::parse_format(args.format)), args.sigma,
        args.convention == "mu" ? bench::RegularizerConvention::mu
                                : bench::RegularizerConvention::n_mu};

  if (args.solver == "cg") spec.solver = bench::SolverKind::cg;
  else if (args.solver == "nystrom-pcg") spec.solver = bench::SolverKind::nystrom_pcg;
  else if (args.solver == "sketch-and-solve")
    spec.solver = bench::SolverKind::sketch_and_solve;
  else spec.solver = bench::SolverKind::block_pcg;

  if (args.policy == "fixed") spec.policy = bench::RankPolicy::fixed;
  else if (args.policy == "adaptive-error") spec.policy = bench::RankPolicy::adaptive_error;
  else spec.policy = bench::RankPolicy::adaptive_ratio;

  spec.mu = args.mu;
  spec.eta = args.tol;
  spec.relative_tol = args.relative_tol;
  spec.max_iter = static_cast<Index>(args.max_iter);
  spec.rank = static_cast<Index>(args.rank);
  spec.ell0 = static_cast<Index>(args.ell0);
  spec.ell_max = static_cast<Index>(args.ell_max);
  spec.tau = args.tau;
  spec.seed = args.seed;
  if (!args.rhs.empty())
    spec.rhs = io::load_vector(args.rhs, io::parse_format(args.format));
  return spec;
}

/// Writes `lines` to --out or stdout.
void emit(const CommonArgs& args, const std::vector<std::string>& lines) {
  if (args.out.empty()) {
    for (const auto& line : lines) std::cout << line << "\n";
    return;
  }
  std::ofstream out(args.out);
  if (!out) throw std::runtime_error("cannot open output file " + args.out);
  for (const auto& line : lines) out << line << "\n";
}

int exit_code_for(const bench::BenchRecord& rec) {
  if (!rec.failure.empty()) return kExitError;
  return rec.converged ? kExitOk : kExitNotConverged;
}

int run_solve(const CommonArgs& args) {
  const bench::BenchRecord rec = bench::run_benchmark(build_spec(args));
  emit(args, {rec.json_line()});
  if (!rec.failure.empty()) std::cerr << "solve failed: " << rec.failure << "\n";
  return exit_code_for(rec);
}

int run_bench(const CommonArgs& args) {
  const auto records =
      bench::run_benchmark_trials(build_spec(args), static_cast<Index>(args.trials));
  std::vector<std::string> lines;
  lines.reserve(records.size() + 1);
  int code = kExitOk;
  for (const auto& rec : records) {
    lines.push_back(rec.json_line());
    code = std::max(code, exit_code_for(rec));
  }
  lines.push_back(bench::summarize(records));
  emit(args, lines);
  return code;
}

/// Resolves the operator for approx/adaptive without running a solver.
struct BuiltOperator {
  std::shared_ptr<const LinearOperator> op;
  double shift = 0.0;
};

BuiltOperator build_operator(const CommonArgs& args) {
  BuiltOperator built;
  built.shift = args.mu;
  int sources = 0;
  if (!args.matrix.empty()) {
    ++sources;
    built.op = std::make_shared<DenseOperator>(io::require_symmetric(
        io::load_matrix(args.matrix, io::parse_format(args.format)), "npcg"));
  }
  if (!args.synthetic.empty()) {
    ++sources;
    built.op = std::make_shared<DenseOperator>(
        synthesize_operator(SpectrumProfile(parse_synthetic_spectrum(args.synthetic)),
                            bench::synthetic_operator_seed(args.seed)));
  }
  if (!args.ridge.empty()) {
    ++sources;
    built.op = std::make_shared<GramRidgeOperator>(
        gram_ridge(io::load_matrix(args.ridge, io::parse_format(args.format))));
  }
  if (!args.krr.empty()) {
    ++sources;
    auto kernel = std::make_shared<KernelOperator>(gaussian_kernel(
        io::load_matrix(args.krr, io::parse_format(args.format)), args.sigma));
    if (args.convention == "n-mu")
      built.shift = args.mu * static_cast<double>(kernel->dim());
    built.op = std::move(kernel);
  }
  if (sources != 1)
    throw std::invalid_argument("exactly one of --matrix/--synthetic/--ridge/--krr required");
  return built;
}

int run_approx(const CommonArgs& args) {
  const BuiltOperator built = build_operator(args);
  if (args.rank < 1) throw std::invalid_argument("approx: --rank must be >= 1");
  Rng rng(args.seed);
  const NystromApproximation approx =
      randomized_nystrom(*built.op, static_cast<Index>(args.rank), rng);

  json j;
  j["n"] = approx.dim();
  j["ell"] = approx.size();
  j["rank"] = approx.rank();
  j["lambda_top"] = approx.lambda.size() > 0 ? approx.lambda(0) : 0.0;
  j["lambda_ell"] = approx.lambda_min();
  j["shift_used"] = approx.shift_used;
  j["seed"] = args.seed;
  emit(args, {j.dump()});
  return kExitOk;
}

int run_adaptive(const CommonArgs& args) {
  const BuiltOperator built = build_operator(args);
  AdaptiveConfig config;
  config.ell0 = static_cast<Index>(args.ell0);
  config.ell_max = args.ell_max > 0 ? static_cast<Index>(args.ell_max) : built.op->dim();
  config.mu = built.shift;
  config.tol_mode =
      args.policy == "adaptive-ratio" ? TolMode::ratio : TolMode::error;
  config.tau = args.tau;
  config.sketch =
      args.krr.empty() ? SketchKind::gaussian : SketchKind::column_sampling;
  Rng rng(args.seed);
  const AdaptiveOutcome outcome = config.tol_mode == TolMode::ratio
                                      ? adaptive_nystrom_ratio(*built.op, config, rng)
                                      : adaptive_nystrom(*built.op, config, rng);

  json j;
  j["n"] = built.op->dim();
  j["mu"] = built.shift;
  j["ell_final"] = outcome.ell_final;
  j["doublings"] = outcome.doublings;
  j["hit_cap"] = outcome.hit_cap;
  if (outcome.error_estimate) j["error_estimate"] = *outcome.error_estimate;
  j["posterior_condition"] = outcome.posterior_condition_estimate;
  j["lambda_ell"] = outcome.approximation.lambda_min();
  j["seed"] = args.seed;
  emit(args, {j.dump()});
  return kExitOk;
}

int run_deff(const CommonArgs& args) {
  if (!(args.mu > 0.0)) throw std::invalid_argument("deff: --mu must be > 0");
  Vector lam;
  if (!args.synthetic.empty()) {
    lam = parse_synthetic_spectrum(args.synthetic);
  } else if (!args.matrix.empty()) {
    const Matrix a = io::require_symmetric(
        io::load_matrix(args.matrix, io::parse_format(args.format)), "deff");
    lam = dense::sym_eigenvalues(a).cwiseMax(0.0);
  } else {
    throw std::invalid_argument("deff: provide --synthetic or --matrix");
  }
  const SpectrumProfile profile{lam};

  json j;
  j["n"] = profile.size();
  j["mu"] = args.mu;
  j["d_eff"] = effective_dimension(profile, args.mu);
  j["recommended_sketch_size"] = recommended_sketch_size(profile, args.mu);
  emit(args, {j.dump()});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nystrom-preconditioned solvers for regularized symmetric systems"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* solve = app.add_subcommand("solve", "Solve (A + mu I) x = b once");
  solve->add_option("--solver", args.solver, "Solver")
      ->check(CLI::IsMember({"cg", "nystrom-pcg", "sketch-and-solve", "block-pcg"}));
  CLI::App* approx = app.add_subcommand("approx", "Randomized Nystrom approximation");
  CLI::App* adaptive = app.add_subcommand("adaptive", "Adaptive rank selection");
  CLI::App* deff = app.add_subcommand("deff", "Effective dimension of a spectrum");
  CLI::App* bench = app.add_subcommand("bench", "Repeated benchmark trials");
  for (CLI::App* cmd : {solve, approx, adaptive, deff, bench})
    add_common_flags(cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(args);
    if (approx->parsed()) return run_approx(args);
    if (adaptive->parsed()) return run_adaptive(args);
    if (deff->parsed()) return run_deff(args);
    return run_bench(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
