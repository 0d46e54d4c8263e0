#include "npcg/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <string>

#include "npcg/dense.hpp"

namespace npcg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_solver_inputs(Index n, const Vector& b, const Vector& x0,
                         const SolveOptions& opt, const char* context) {
  if (b.size() != n)
    throw std::invalid_argument(std::string(context) + ": right-hand side length mismatch");
  if (x0.size() != n)
    throw std::invalid_argument(std::string(context) + ": initial guess length mismatch");
  if (!(opt.eta > 0.0))
    throw std::invalid_argument(std::string(context) + ": eta must be > 0");
  if (opt.max_iter < 0)
    throw std::invalid_argument(std::string(context) + ": max_iter must be >= 0");
}

/**
 * @brief Shared (P)CG loop.
 *
 * cg() and nystrom_pcg() both instantiate this template; with an identity
 * preconditioner action the arithmetic sequence is identical, so the two
 * drivers produce bitwise-equal iterates on the same inputs.
 */
template <class MatvecFn, class PrecondFn>
SolveReport pcg_loop(Index n, MatvecFn&& apply_op, PrecondFn&& apply_precond,
                     const Vector& b, const Vector& x0, const SolveOptions& opt,
                     const char* context) {
  const auto start = Clock::now();
  check_solver_inputs(n, b, x0, opt, context);

  SolveReport report;
  report.eta_used = opt.relative ? opt.eta * b.norm() : opt.eta;
  report.x = x0;
  if (opt.record_iterates) report.iterates.push_back(report.x);

  Vector r = b - apply_op(x0);
  report.matvec_count = 1;
  double res = r.norm();
  report.residual_history.push_back(res);
  if (!std::isfinite(res)) {
    report.wall_time = seconds_since(start);
    throw SolveDivergenceError(std::string(context) + ": non-finite initial residual",
                               std::move(report));
  }
  if (res <= report.eta_used) {
    report.converged = true;
    report.wall_time = seconds_since(start);
    return report;
  }

  Vector z = apply_precond(r);
  Vector p = z;
  double rz = r.dot(z);

  for (Index t = 1; t <= opt.max_iter; ++t) {
    const Vector v = apply_op(p);
    ++report.matvec_count;
    const double pv = p.dot(v);
    report.iterations = t;
    if (!(pv > 0.0) || !std::isfinite(pv)) {
      report.wall_time = seconds_since(start);
      std::ostringstream msg;
      msg << context << ": breakdown at iteration " << t << " (p'Ap = " << pv << ")";
      throw SolveDivergenceError(msg.str(), std::move(report));
    }
    const double alpha = rz / pv;
    report.x += alpha * p;
    r -= alpha * v;
    res = r.norm();
    report.residual_history.push_back(res);
    if (opt.record_iterates) report.iterates.push_back(report.x);
    if (!std::isfinite(res)) {
      report.wall_time = seconds_since(start);
      std::ostringstream msg;
      msg << context << ": non-finite residual at iteration " << t;
      throw SolveDivergenceError(msg.str(), std::move(report));
    }
    if (res <= report.eta_used) {
      report.converged = true;
      break;
    }
    z = apply_precond(r);
    const double rz_next = r.dot(z);
    const double beta = rz_next / rz;
    p = z + beta * p;
    rz = rz_next;
  }

  report.wall_time = seconds_since(start);
  return report;
}

}  // namespace

SolveReport cg(const LinearOperator& op_mu, const Vector& b, const SolveOptions& opt) {
  return cg(op_mu, b, Vector::Zero(op_mu.dim()), opt);
}

SolveReport cg(const LinearOperator& op_mu, const Vector& b, const Vector& x0,
               const SolveOptions& opt) {
  return pcg_loop(
      op_mu.dim(), [&](const Vector& v) { return op_mu.matvec(v); },
      [](const Vector& r) { return r; }, b, x0, opt, "cg");
}

SolveReport nystrom_pcg(const LinearOperator& op, const Vector& b, double mu,
                        const NystromPreconditioner& precond, const SolveOptions& opt) {
  return nystrom_pcg(op, b, Vector::Zero(op.dim()), mu, precond, opt);
}

SolveReport nystrom_pcg(const LinearOperator& op, const Vector& b, const Vector& x0,
                        double mu, const NystromPreconditioner& precond,
                        const SolveOptions& opt) {
  if (!(mu >= 0.0)) throw std::invalid_argument("nystrom_pcg: mu must be >= 0");
  if (precond.size() > 0) {
    if (precond.dim() != op.dim())
      throw std::invalid_argument("nystrom_pcg: preconditioner dimension mismatch");
    if (precond.mu != mu)
      throw std::invalid_argument("nystrom_pcg: preconditioner built with a different mu");
  }
  const auto apply_op = [&](const Vector& v) {
    Vector out = op.matvec(v);
    out += mu * v;  // same arithmetic as RegularizedOperator, for bitwise parity
    return out;
  };
  if (precond.size() == 0)
    return pcg_loop(
        op.dim(), apply_op, [](const Vector& r) { return r; }, b, x0, opt, "nystrom_pcg");
  return pcg_loop(
      op.dim(), apply_op, [&](const Vector& r) { return precond.apply_inverse(r); }, b,
      x0, opt, "nystrom_pcg");
}

BlockSolveReport block_nystrom_pcg(const LinearOperator& op, const Matrix& b, double mu,
                                   const NystromPreconditioner& precond,
                                   const SolveOptions& opt) {
  const auto start = Clock::now();
  const Index n = op.dim();
  const Index s = b.cols();
  if (b.rows() != n)
    throw std::invalid_argument("block_nystrom_pcg: right-hand side row mismatch");
  if (s < 1) throw std::invalid_argument("block_nystrom_pcg: need at least one column");
  if (!b.allFinite())
    throw std::invalid_argument("block_nystrom_pcg: right-hand side has non-finite entries");
  if (!(opt.eta > 0.0)) throw std::invalid_argument("block_nystrom_pcg: eta must be > 0");
  if (!(mu >= 0.0)) throw std::invalid_argument("block_nystrom_pcg: mu must be >= 0");
  if (precond.size() > 0 && precond.dim() != n)
    throw std::invalid_argument("block_nystrom_pcg: preconditioner dimension mismatch");

  BlockSolveReport report;
  report.eta_used = opt.eta;
  Vector threshold(s);
  for (Index j = 0; j < s; ++j)
    threshold(j) = opt.relative ? opt.eta * b.col(j).norm() : opt.eta;

  // One upfront rank-revealing QR of the right-hand block; dependent columns
  // are deflated and solved implicitly through the retained basis.
  Eigen::ColPivHouseholderQR<Matrix> qr(b);
  const Matrix r_upper = qr.matrixR()
                             .topLeftCorner(std::min(n, s), s)
                             .triangularView<Eigen::Upper>();
  const double pivot_max = s > 0 ? std::abs(r_upper(0, 0)) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < r_upper.rows(); ++i)
    if (std::abs(r_upper(i, i)) > 1e-12 * pivot_max) ++rank;
  for (Index i = rank; i < s; ++i)
    report.deflated.push_back(qr.colsPermutation().indices()(i));
  std::sort(report.deflated.begin(), report.deflated.end());

  report.residual_history.assign(static_cast<std::size_t>(s), {});
  report.converged.assign(static_cast<std::size_t>(s), false);

  if (rank == 0) {
    // B = 0 within the deflation threshold: the zero solution is exact.
    report.x = Matrix::Zero(n, s);
    for (Index j = 0; j < s; ++j) {
      const double res = b.col(j).norm();
      report.residual_history[static_cast<std::size_t>(j)].push_back(res);
      report.converged[static_cast<std::size_t>(j)] = res <= threshold(j);
    }
    report.wall_time = seconds_since(start);
    return report;
  }

  // B = Q_r * mix (up to the deflation threshold); solve A_mu X_tilde = Q_r
  // and map back with X = X_tilde * mix.
  Matrix q_r(n, rank);
  q_r.setIdentity();
  q_r = qr.householderQ() * q_r;
  const Matrix mix =
      r_upper.topRows(rank) * qr.colsPermutation().transpose();
  const Matrix defl_error = b - q_r * mix;  // ~1e-12-small, folded into residuals

  const auto apply_op_block = [&](const Matrix& block) {
    Matrix out = op.apply_block(block);
    out += mu * block;
    return out;
  };
  const auto apply_precond_block = [&](const Matrix& block) {
    return precond.size() == 0 ? block : precond.apply_inverse_block(block);
  };

  Matrix x_tilde = Matrix::Zero(n, rank);
  Matrix resid = q_r;  // residual block for the orthonormal right-hand sides
  Matrix z = apply_precond_block(resid);
  Matrix p = z;
  Matrix zr = z.transpose() * resid;  // rank x rank

  const auto record_residuals = [&]() -> bool {
    const Matrix original = resid * mix + defl_error;
    bool all_done = true;
    for (Index j = 0; j < s; ++j) {
      const double res = original.col(j).norm();
      if (!std::isfinite(res))
        throw std::runtime_error("block_nystrom_pcg: non-finite residual");
      report.residual_history[static_cast<std::size_t>(j)].push_back(res);
      report.converged[static_cast<std::size_t>(j)] = res <= threshold(j);
      all_done = all_done && report.converged[static_cast<std::size_t>(j)];
    }
    return all_done;
  };

  bool done = record_residuals();
  for (Index t = 1; t <= opt.max_iter && !done; ++t) {
    report.iterations = t;
    const Matrix v = apply_op_block(p);
    const Matrix gram = p.transpose() * v;
    Matrix alpha;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() == Eigen::Success) {
      alpha = llt.solve(zr);
    } else {
      // Singular search-direction Gram matrix: damp by 10 ulps of its scale
      // and fall back to a pseudo-inverse solve.
      ++report.fallback_count;
      const double damp = 10.0 * dense::ulp_spacing(gram.norm());
      const Matrix damped = gram + damp * Matrix::Identity(rank, rank);
      alpha = damped.completeOrthogonalDecomposition().pseudoInverse() * zr;
    }
    x_tilde += p * alpha;
    resid -= v * alpha;
    done = record_residuals();
    if (done) break;
    z = apply_precond_block(resid);
    const Matrix zr_next = z.transpose() * resid;
    Matrix beta;
    Eigen::LLT<Matrix> llt_beta(zr);
    if (llt_beta.info() == Eigen::Success) {
      beta = llt_beta.solve(zr_next);
    } else {
      ++report.fallback_count;
      const double damp = 10.0 * dense::ulp_spacing(zr.norm());
      const Matrix damped = zr + damp * Matrix::Identity(rank, rank);
      beta = damped.completeOrthogonalDecomposition().pseudoInverse() * zr_next;
    }
    p = z + p * beta;
    zr = zr_next;
  }

  report.x = x_tilde * mix;
  report.wall_time = seconds_since(start);
  return report;
}

Index iteration_bound(double kappa, double epsilon) {
  if (!(kappa >= 1.0))
    throw std::invalid_argument("iteration_bound: kappa must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("iteration_bound: epsilon must lie in (0, 1)");
  if (kappa == 1.0) return 1;
  const double root = std::sqrt(kappa);
  const double rate = std::log((root + 1.0) / (root - 1.0));
  const double t = std::ceil(std::log(2.0 / epsilon) / rate);
  return std::max<Index>(1, static_cast<Index>(t));
}

}  // namespace npcg
