#pragma once

#include <cstdint>
#include <memory>

#include "npcg/random.hpp"
#include "npcg/types.hpp"

namespace npcg {

/**
 * @brief Matvec-access handle for a symmetric psd matrix A of dimension n.
 *
 * Every algorithm in the library touches A only through this contract.
 * Operators are immutable after construction, so concurrent matvec calls
 * are safe.  Column access is an optional capability, present only where
 * a concrete operator can produce A e_j cheaply (dense, kernel).
 *
 * matvec() validates dimensions and finiteness and is deterministic:
 * the same input vector yields bitwise-identical output.  apply_block()
 * is the same ell matvecs issued as one batch; dense-backed operators
 * override it with a matrix-matrix product, which matters for large
 * sketches.
 */
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  Index dim() const { return do_dim(); }

  /// A·v with contract checks (dimension, finite entries).
  Vector matvec(const Vector& v) const;

  /// A·V, one column per matvec; overridable for batched evaluation.
  Matrix apply_block(const Matrix& v) const;

  virtual bool has_column_access() const { return false; }

  /// A·e_j for operators that advertise column access.
  Vector column(Index j) const;

 protected:
  virtual Index do_dim() const = 0;
  virtual void do_matvec(const Vector& v, Vector& out) const = 0;
  virtual void do_apply_block(const Matrix& v, Matrix& out) const;
  virtual void do_column(Index j, Vector& out) const;
};

/// @brief Dense symmetric wrapper; the workhorse for synthetic problems.
class DenseOperator final : public LinearOperator {
 public:
  /// Rejects nonsquare or (beyond roundoff) asymmetric input.
  explicit DenseOperator(Matrix a);

  bool has_column_access() const override { return true; }
  const Matrix& dense() const { return a_; }

 protected:
  Index do_dim() const override { return a_.rows(); }
  void do_matvec(const Vector& v, Vector& out) const override;
  void do_apply_block(const Matrix& v, Matrix& out) const override;
  void do_column(Index j, Vector& out) const override;

 private:
  Matrix a_;
};

/// @brief A_mu = A + mu*I; matvec(v) = base.matvec(v) + mu*v exactly.
class RegularizedOperator final : public LinearOperator {
 public:
  RegularizedOperator(std::shared_ptr<const LinearOperator> base, double mu);

  /// Non-owning view; the base operator must outlive the result.
  RegularizedOperator(const LinearOperator& base, double mu);

  double mu() const { return mu_; }
  const LinearOperator& base() const { return *base_; }

 protected:
  Index do_dim() const override { return base_->dim(); }
  void do_matvec(const Vector& v, Vector& out) const override;
  void do_apply_block(const Matrix& v, Matrix& out) const override;

 private:
  std::shared_ptr<const LinearOperator> owned_;
  const LinearOperator* base_;
  double mu_;
};

/**
 * @brief Ridge Gram operator v -> (1/n_rows) G^T (G v) on dimension d.
 *
 * G^T G is never materialized.  Psd by construction; no column access
 * (pure-matvec operator).
 */
class GramRidgeOperator final : public LinearOperator {
 public:
  explicit GramRidgeOperator(Matrix design);

  Index n_rows() const { return g_.rows(); }
  const Matrix& design() const { return g_; }

 protected:
  Index do_dim() const override { return g_.cols(); }
  void do_matvec(const Vector& v, Vector& out) const override;
  void do_apply_block(const Matrix& v, Matrix& out) const override;

 private:
  Matrix g_;
};

/**
 * @brief Gaussian kernel operator, K_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)).
 *
 * K is stored densely for n up to dense_cap (default 20,000) and otherwise
 * applied block-wise from the stored points.  KRR solves (K + n*mu*I)x = b:
 * the solver always receives the literal shift, so KRR drivers pass n*mu.
 */
class KernelOperator final : public LinearOperator {
 public:
  static constexpr Index kDefaultDenseCap = 20000;

  /// points: one row per input vector x_i.  Rejects sigma <= 0.
  KernelOperator(Matrix points, double sigma, Index dense_cap = kDefaultDenseCap);

  bool has_column_access() const override { return true; }
  double sigma() const { return sigma_; }
  bool is_dense() const { return kernel_.size() > 0; }
  const Matrix& points() const { return points_; }

 protected:
  Index do_dim() const override { return points_.rows(); }
  void do_matvec(const Vector& v, Vector& out) const override;
  void do_apply_block(const Matrix& v, Matrix& out) const override;
  void do_column(Index j, Vector& out) const override;

 private:
  Matrix points_;
  double sigma_;
  Matrix kernel_;  // empty when n exceeds the dense cap
};

/// @brief Explicit eigenvalue list for synthetic operators and bound oracles.
struct SpectrumProfile {
  Vector eigenvalues;  // nonincreasing, all >= 0

  explicit SpectrumProfile(Vector lambdas);

  Index size() const { return eigenvalues.size(); }
};

/// A + mu*I as an owning operator.
RegularizedOperator regularize(std::shared_ptr<const LinearOperator> op, double mu);

/// Ridge Gram operator for a design matrix (rejects empty G).
GramRidgeOperator gram_ridge(Matrix design);

/// Gaussian kernel operator over row-point data (rejects sigma <= 0).
KernelOperator gaussian_kernel(Matrix points, double sigma,
                               Index dense_cap = KernelOperator::kDefaultDenseCap);

/**
 * @brief A = Q diag(profile) Q^T for a seeded random orthogonal Q.
 *
 * Deterministic in the seed; eigenvalues of the materialized matrix match
 * the profile to 1e-10.
 */
DenseOperator synthesize_operator(const SpectrumProfile& profile, std::uint64_t seed);

}  // namespace npcg
