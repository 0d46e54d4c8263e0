#include "npcg/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "npcg/dense.hpp"

namespace npcg {

namespace {

void check_vector(const LinearOperator& op, const Vector& v, const char* who) {
  if (v.size() != op.dim())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch (got " +
                                std::to_string(v.size()) + ", operator dim " +
                                std::to_string(op.dim()) + ")");
  if (!v.allFinite())
    throw std::invalid_argument(std::string(who) + ": input has non-finite entries");
}

}  // namespace

Vector LinearOperator::matvec(const Vector& v) const {
  check_vector(*this, v, "LinearOperator - matvec");
  Vector out(dim());
  do_matvec(v, out);
  return out;
}

Matrix LinearOperator::apply_block(const Matrix& v) const {
  if (v.rows() != dim())
    throw std::invalid_argument("LinearOperator - apply_block: dimension mismatch");
  if (!v.allFinite())
    throw std::invalid_argument("LinearOperator - apply_block: input has non-finite entries");
  Matrix out(dim(), v.cols());
  do_apply_block(v, out);
  return out;
}

Vector LinearOperator::column(Index j) const {
  if (!has_column_access())
    throw std::runtime_error("LinearOperator - column: operator has no column access");
  if (j < 0 || j >= dim())
    throw std::invalid_argument("LinearOperator - column: index out of range");
  Vector out(dim());
  do_column(j, out);
  return out;
}

void LinearOperator::do_apply_block(const Matrix& v, Matrix& out) const {
  Vector column_out(dim());
  for (Index j = 0; j < v.cols(); ++j) {
    do_matvec(v.col(j), column_out);
    out.col(j) = column_out;
  }
}

void LinearOperator::do_column(Index, Vector&) const {
  throw std::runtime_error("LinearOperator - column: operator has no column access");
}

DenseOperator::DenseOperator(Matrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols())
    throw std::invalid_argument("DenseOperator: matrix must be square");
  const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("DenseOperator: matrix must be symmetric");
}

void DenseOperator::do_matvec(const Vector& v, Vector& out) const {
  out.noalias() = a_ * v;
}

void DenseOperator::do_apply_block(const Matrix& v, Matrix& out) const {
  out.noalias() = a_ * v;
}

void DenseOperator::do_column(Index j, Vector& out) const { out = a_.col(j); }

RegularizedOperator::RegularizedOperator(std::shared_ptr<const LinearOperator> base,
                                         double mu)
    : owned_(std::move(base)), base_(owned_.get()), mu_(mu) {
  if (base_ == nullptr)
    throw std::invalid_argument("RegularizedOperator: base operator is null");
  if (!(mu_ >= 0.0)) throw std::invalid_argument("RegularizedOperator: mu must be >= 0");
}

RegularizedOperator::RegularizedOperator(const LinearOperator& base, double mu)
    : owned_(nullptr), base_(&base), mu_(mu) {
  if (!(mu_ >= 0.0)) throw std::invalid_argument("RegularizedOperator: mu must be >= 0");
}

void RegularizedOperator::do_matvec(const Vector& v, Vector& out) const {
  out = base_->matvec(v);
  out += mu_ * v;
}

void RegularizedOperator::do_apply_block(const Matrix& v, Matrix& out) const {
  out = base_->apply_block(v);
  out += mu_ * v;
}

GramRidgeOperator::GramRidgeOperator(Matrix design) : g_(std::move(design)) {
  if (g_.rows() < 1 || g_.cols() < 1)
    throw std::invalid_argument("GramRidgeOperator: design matrix must be nonempty");
  if (!g_.allFinite())
    throw std::invalid_argument("GramRidgeOperator: design matrix has non-finite entries");
}

void GramRidgeOperator::do_matvec(const Vector& v, Vector& out) const {
  // (1/n) G^T (G v) without forming G^T G.
  out.noalias() = g_.transpose() * (g_ * v);
  out /= static_cast<double>(g_.rows());
}

void GramRidgeOperator::do_apply_block(const Matrix& v, Matrix& out) const {
  out.noalias() = g_.transpose() * (g_ * v);
  out /= static_cast<double>(g_.rows());
}

namespace {

Matrix kernel_block(const Matrix& points, double sigma, Index row_begin, Index rows) {
  // Rows [row_begin, row_begin + rows) of the Gaussian kernel matrix.
  const auto block = points.middleRows(row_begin, rows);
  Matrix sq = -2.0 * (block * points.transpose());
  const Vector norms = points.rowwise().squaredNorm();
  sq.colwise() += norms.segment(row_begin, rows);
  sq.rowwise() += norms.transpose();
  // Clamp tiny negative squared distances from cancellation, then pin the
  // diagonal at exp(0) = 1 exactly.
  Matrix k = (sq.array().max(0.0) * (-1.0 / (2.0 * sigma * sigma))).exp().matrix();
  for (Index i = 0; i < rows; ++i) k(i, row_begin + i) = 1.0;
  return k;
}

}  // namespace

KernelOperator::KernelOperator(Matrix points, double sigma, Index dense_cap)
    : points_(std::move(points)), sigma_(sigma) {
  if (points_.rows() < 1)
    throw std::invalid_argument("KernelOperator: need at least one point");
  if (!(sigma_ > 0.0)) throw std::invalid_argument("KernelOperator: sigma must be > 0");
  if (!points_.allFinite())
    throw std::invalid_argument("KernelOperator: points have non-finite entries");
  if (points_.rows() <= dense_cap)
    kernel_ = kernel_block(points_, sigma_, 0, points_.rows());
}

void KernelOperator::do_matvec(const Vector& v, Vector& out) const {
  if (is_dense()) {
    out.noalias() = kernel_ * v;
    return;
  }
  // Block-wise evaluation from stored points when K exceeds the dense cap.
  constexpr Index kBlock = 512;
  const Index n = points_.rows();
  for (Index begin = 0; begin < n; begin += kBlock) {
    const Index rows = std::min(kBlock, n - begin);
    out.segment(begin, rows).noalias() = kernel_block(points_, sigma_, begin, rows) * v;
  }
}

void KernelOperator::do_apply_block(const Matrix& v, Matrix& out) const {
  if (is_dense()) {
    out.noalias() = kernel_ * v;
    return;
  }
  constexpr Index kBlock = 512;
  const Index n = points_.rows();
  for (Index begin = 0; begin < n; begin += kBlock) {
    const Index rows = std::min(kBlock, n - begin);
    out.middleRows(begin, rows).noalias() = kernel_block(points_, sigma_, begin, rows) * v;
  }
}

void KernelOperator::do_column(Index j, Vector& out) const {
  if (is_dense()) {
    out = kernel_.col(j);
    return;
  }
  const Vector diff_sq =
      (points_.rowwise() - points_.row(j)).rowwise().squaredNorm();
  out = (diff_sq.array() * (-1.0 / (2.0 * sigma_ * sigma_))).exp().matrix();
  out(j) = 1.0;
}

SpectrumProfile::SpectrumProfile(Vector lambdas) : eigenvalues(std::move(lambdas)) {
  if (eigenvalues.size() < 1)
    throw std::invalid_argument("SpectrumProfile: need at least one eigenvalue");
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    if (!(eigenvalues(i) >= 0.0) || !std::isfinite(eigenvalues(i)))
      throw std::invalid_argument("SpectrumProfile: eigenvalues must be finite and >= 0");
    if (i > 0 && eigenvalues(i) > eigenvalues(i - 1))
      throw std::invalid_argument("SpectrumProfile: eigenvalues must be nonincreasing");
  }
}

RegularizedOperator regularize(std::shared_ptr<const LinearOperator> op, double mu) {
  return RegularizedOperator(std::move(op), mu);
}

GramRidgeOperator gram_ridge(Matrix design) { return GramRidgeOperator(std::move(design)); }

KernelOperator gaussian_kernel(Matrix points, double sigma, Index dense_cap) {
  return KernelOperator(std::move(points), sigma, dense_cap);
}

DenseOperator synthesize_operator(const SpectrumProfile& profile, std::uint64_t seed) {
  const Index n = profile.size();
  Rng rng(seed);
  const Matrix q = random_orthogonal(rng, n);
  Matrix a = q * profile.eigenvalues.asDiagonal() * q.transpose();
  // Exact symmetry, so DenseOperator's symmetry contract holds bitwise.
  a = ((a + a.transpose()) / 2.0).eval();
  return DenseOperator(std::move(a));
}

}  // namespace npcg
