#pragma once

#include <stdexcept>
#include <vector>

#include "npcg/operators.hpp"
#include "npcg/preconditioner.hpp"
#include "npcg/types.hpp"

namespace npcg {

/**
 * @brief Options shared by the (P)CG drivers.
 *
 * The stopping rule is absolute ||r||_2 <= eta by default; setting
 * `relative` scales eta by ||b|| and the report records the threshold
 * actually used.  `record_iterates` keeps the full iterate history for
 * error-envelope tests.
 */
struct SolveOptions {
  double eta = 1e-10;
  Index max_iter = 500;
  bool relative = false;
  bool record_iterates = false;
};

/// @brief Outcome of a single-RHS (P)CG run.
struct SolveReport {
  Vector x;
  Index iterations = 0;
  std::vector<double> residual_history;  // length iterations + 1
  bool converged = false;
  Index matvec_count = 0;  // iterations + 1: one per loop plus initial residual
  double wall_time = 0.0;  // seconds
  double eta_used = 0.0;   // absolute threshold after resolving `relative`
  std::vector<Vector> iterates;  // filled only when requested
};

/// @brief Outcome of a block PCG run.
struct BlockSolveReport {
  Matrix x;                                          // n-by-s, original basis
  Index iterations = 0;
  std::vector<std::vector<double>> residual_history; // per input column
  std::vector<bool> converged;                       // per input column
  std::vector<Index> deflated;                       // input columns dropped by the RHS QR
  Index fallback_count = 0;                          // damped pseudo-inverse events
  double wall_time = 0.0;
  double eta_used = 0.0;
};

/// Thrown when a solver iterate turns non-finite; carries the partial report.
class SolveDivergenceError : public std::runtime_error {
 public:
  SolveDivergenceError(const std::string& what, SolveReport report)
      : std::runtime_error(what), report(std::move(report)) {}
  SolveReport report;
};

/// Textbook conjugate gradients on an spd operator (x0 = 0 overload).
SolveReport cg(const LinearOperator& op_mu, const Vector& b, const SolveOptions& opt = {});
SolveReport cg(const LinearOperator& op_mu, const Vector& b, const Vector& x0,
               const SolveOptions& opt = {});

/**
 * @brief Nystrom PCG: left-preconditioned CG on A_mu = A + mu I.
 *
 *   z0 = P^-1 r0,  alpha = (r^T z)/(p^T A_mu p),  beta = (r+^T z+)/(r^T z)
 *
 * One matvec with A_mu and one apply_inverse per iteration.  The
 * preconditioner must have been built with the same mu.  With an empty
 * (ell = 0, identity) preconditioner the iterate sequence matches cg()
 * bitwise for the same inputs.
 */
SolveReport nystrom_pcg(const LinearOperator& op, const Vector& b, double mu,
                        const NystromPreconditioner& precond, const SolveOptions& opt = {});
SolveReport nystrom_pcg(const LinearOperator& op, const Vector& b, const Vector& x0,
                        double mu, const NystromPreconditioner& precond,
                        const SolveOptions& opt = {});

/**
 * @brief Block PCG for multiple right-hand sides.
 *
 * The initial block residual is orthonormalized once by a rank-revealing
 * thin QR (columns with singular value below 1e-12 times the largest are
 * deflated and recorded); O'Leary's block updates follow with P^-1 applied
 * block-wise and no re-orthogonalization.  A singular block alpha-solve
 * falls back to a 10x-damped pseudo-inverse, counted in the report.
 * Solutions are returned in the original basis, each column checked against
 * its own residual tolerance.
 */
BlockSolveReport block_nystrom_pcg(const LinearOperator& op, const Matrix& b, double mu,
                                   const NystromPreconditioner& precond,
                                   const SolveOptions& opt = {});

/**
 * @brief CG iteration bound from the standard convergence envelope:
 * ceil( ln(2/eps) / ln((sqrt(kappa)+1)/(sqrt(kappa)-1)) ); kappa = 1 gives 1.
 */
Index iteration_bound(double kappa, double epsilon);

}  // namespace npcg
