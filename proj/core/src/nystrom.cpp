#include "npcg/nystrom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "npcg/dense.hpp"

namespace npcg {

Index NystromApproximation::rank() const {
  Index r = 0;
  for (Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) > 0.0) ++r;
  return r;
}

double NystromApproximation::lambda_min() const {
  return lambda.size() == 0 ? 0.0 : lambda(lambda.size() - 1);
}

Matrix NystromApproximation::materialize() const {
  if (size() == 0) return Matrix::Zero(dim(), dim());
  return u * lambda.asDiagonal() * u.transpose();
}

SketchPair make_empty_sketch(Index n) {
  if (n < 1) throw std::invalid_argument("make_empty_sketch: dimension must be positive");
  SketchPair pair;
  pair.omega = Matrix(n, 0);
  pair.y = Matrix(n, 0);
  return pair;
}

SketchPair extend_sketch(const SketchPair& pair, const LinearOperator& op, Index extra,
                         Rng& rng) {
  const Index n = op.dim();
  if (pair.dim() != n) throw std::invalid_argument("extend_sketch: dimension mismatch");
  if (extra < 1) throw std::invalid_argument("extend_sketch: extra must be >= 1");
  if (pair.size() + extra > n)
    throw std::invalid_argument("extend_sketch: sketch size would exceed dimension");

  Matrix fresh = gaussian_matrix(rng, n, extra);
  // Two passes of block Gram-Schmidt against the existing columns keep the
  // concatenated test matrix jointly orthonormal; the range of the draw (and
  // hence the approximation) is unchanged.
  for (int pass = 0; pass < 2 && pair.size() > 0; ++pass)
    fresh -= pair.omega * (pair.omega.transpose() * fresh).eval();
  const Matrix q_new = dense::orthonormal_columns(fresh);

  SketchPair grown;
  grown.omega.resize(n, pair.size() + extra);
  grown.omega << pair.omega, q_new;
  grown.y.resize(n, pair.size() + extra);
  grown.y << pair.y, op.apply_block(q_new);
  return grown;
}

SketchPair extend_sketch_columns(const SketchPair& pair, const LinearOperator& op,
                                 Index extra, std::vector<Index>& used, Rng& rng) {
  const Index n = op.dim();
  if (!op.has_column_access())
    throw std::runtime_error("extend_sketch_columns: operator has no column access");
  if (extra < 1) throw std::invalid_argument("extend_sketch_columns: extra must be >= 1");
  if (static_cast<Index>(used.size()) + extra > n)
    throw std::invalid_argument("extend_sketch_columns: sketch size would exceed dimension");

  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  for (const Index j : used) taken[static_cast<std::size_t>(j)] = true;
  std::vector<Index> remaining;
  remaining.reserve(static_cast<std::size_t>(n) - used.size());
  for (Index j = 0; j < n; ++j)
    if (!taken[static_cast<std::size_t>(j)]) remaining.push_back(j);
  // Uniform without replacement among the unused indices.
  for (Index i = 0; i < extra; ++i) {
    const Index pick = i + static_cast<Index>(
                               rng.integer(static_cast<std::uint64_t>(remaining.size() - i)));
    std::swap(remaining[static_cast<std::size_t>(i)], remaining[static_cast<std::size_t>(pick)]);
  }

  SketchPair grown;
  grown.omega = Matrix::Zero(n, pair.size() + extra);
  grown.omega.leftCols(pair.size()) = pair.omega;
  grown.y.resize(n, pair.size() + extra);
  grown.y.leftCols(pair.size()) = pair.y;
  for (Index i = 0; i < extra; ++i) {
    const Index j = remaining[static_cast<std::size_t>(i)];
    grown.omega(j, pair.size() + i) = 1.0;
    grown.y.col(pair.size() + i) = op.column(j);
    used.push_back(j);
  }
  return grown;
}

NystromApproximation nystrom_from_sketch(const SketchPair& pair) {
  const Index n = pair.dim();
  const Index ell = pair.size();
  NystromApproximation approx;
  if (ell == 0) {
    approx.u = Matrix(n, 0);
    approx.lambda = Vector(0);
    return approx;
  }
  if (!pair.y.allFinite())
    throw std::runtime_error("nystrom_from_sketch: sketch has non-finite entries");

  const double nu0 = dense::ulp_spacing(pair.y.norm());
  double nu = nu0;
  Matrix b;
  bool factored = false;
  // Cholesky breakdown escalates the shift by 10x, at most 3 retries.
  for (int attempt = 0; attempt <= 3; ++attempt, nu *= 10.0) {
    const Matrix y_nu = pair.y + nu * pair.omega;
    const Matrix core = pair.omega.transpose() * y_nu;
    Eigen::LLT<Matrix> llt(core);
    if (llt.info() != Eigen::Success) continue;
    b = llt.matrixU().solve<Eigen::OnTheRight>(y_nu);
    if (!b.allFinite()) continue;
    approx.shift_used = nu;
    factored = true;
    break;
  }
  if (!factored) {
    std::ostringstream msg;
    msg << "nystrom_from_sketch: Cholesky failed after 3 shift escalations"
        << " (n = " << n << ", ell = " << ell << ", initial shift = " << nu0
        << ", final shift = " << nu / 10.0 << ", ||Y||_F = " << pair.y.norm() << ")";
    throw std::runtime_error(msg.str());
  }

  dense::ThinSvd svd = dense::thin_svd(b);
  approx.u = std::move(svd.u);
  approx.lambda = (svd.singular.array().square() - approx.shift_used).max(0.0).matrix();
  // Clamping cannot reorder a descending list, but the invariant is asserted.
  for (Index i = 1; i < approx.lambda.size(); ++i)
    if (approx.lambda(i) > approx.lambda(i - 1))
      throw std::runtime_error("nystrom_from_sketch: eigenvalue estimates out of order");
  return approx;
}

NystromApproximation randomized_nystrom(const LinearOperator& op, Index ell, Rng& rng) {
  const Index n = op.dim();
  if (ell < 1 || ell > n)
    throw std::invalid_argument("randomized_nystrom: need 1 <= ell <= dim");
  const SketchPair pair = extend_sketch(make_empty_sketch(n), op, ell, rng);
  return nystrom_from_sketch(pair);
}

NystromApproximation column_sampling_nystrom(const LinearOperator& op, Index ell,
                                             Rng& rng) {
  const Index n = op.dim();
  if (ell < 1 || ell > n)
    throw std::invalid_argument("column_sampling_nystrom: need 1 <= ell <= dim");
  if (!op.has_column_access())
    throw std::runtime_error("column_sampling_nystrom: operator has no column access");
  return column_sampling_nystrom(op, sample_without_replacement(rng, n, ell));
}

NystromApproximation column_sampling_nystrom(const LinearOperator& op,
                                             const std::vector<Index>& indices) {
  const Index n = op.dim();
  const Index ell = static_cast<Index>(indices.size());
  if (ell < 1 || ell > n)
    throw std::invalid_argument("column_sampling_nystrom: need 1 <= #indices <= dim");
  if (!op.has_column_access())
    throw std::runtime_error("column_sampling_nystrom: operator has no column access");

  SketchPair pair;
  pair.omega = Matrix::Zero(n, ell);
  pair.y.resize(n, ell);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < ell; ++i) {
    const Index j = indices[static_cast<std::size_t>(i)];
    if (j < 0 || j >= n)
      throw std::invalid_argument("column_sampling_nystrom: index out of range");
    if (seen[static_cast<std::size_t>(j)])
      throw std::invalid_argument("column_sampling_nystrom: indices must be distinct");
    seen[static_cast<std::size_t>(j)] = true;
    pair.omega(j, i) = 1.0;
    pair.y.col(i) = op.column(j);
  }
  return nystrom_from_sketch(pair);
}

Matrix nystrom_definitional(const Matrix& a, const Matrix& x) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("nystrom_definitional: A must be square");
  if (a.rows() > 2000)
    throw std::invalid_argument("nystrom_definitional: oracle capped at n = 2000");
  if (x.rows() != a.rows())
    throw std::invalid_argument("nystrom_definitional: test matrix shape mismatch");
  if (!x.allFinite())
    throw std::invalid_argument("nystrom_definitional: test matrix has non-finite entries");
  const Matrix ax = a * x;
  const Matrix core = x.transpose() * ax;
  // Pseudo-inverse tolerates rank deficiency in the core matrix.
  const Matrix pinv = core.completeOrthogonalDecomposition().pseudoInverse();
  return ax * pinv * ax.transpose();
}

double expected_error_bound(const SpectrumProfile& profile, Index ell, Index p) {
  const Index n = profile.size();
  if (ell > n) throw std::invalid_argument("expected_error_bound: ell exceeds n");
  const auto& lam = profile.eigenvalues;
  const double e2 = std::exp(2.0);
  if (p >= 2 && ell == 2 * p - 1) {
    double tail = 0.0;  // inclusive: sum_{j >= p} lambda_j
    for (Index j = p - 1; j < n; ++j) tail += lam(j);
    // Written tail-first so a zero lambda_p yields 0 instead of 0/0 via sr_p.
    return 3.0 * lam(p - 1) + (4.0 * e2 / static_cast<double>(p)) * tail;
  }
  if (p < 2 || p > ell - 2)
    throw std::invalid_argument(
        "expected_error_bound: need 2 <= p <= ell - 2, or ell = 2p - 1");
  double tail = 0.0;  // sum_{j > ell - p} lambda_j, 1-based indexing
  for (Index j = ell - p; j < n; ++j) tail += lam(j);
  const double head = 1.0 + 2.0 * static_cast<double>(ell - p) / static_cast<double>(p - 1);
  const double coef =
      2.0 * e2 * static_cast<double>(ell) / static_cast<double>(p * p - 1);
  return head * lam(ell - p) + coef * tail;
}

}  // namespace npcg
