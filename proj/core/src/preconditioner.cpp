#include "npcg/preconditioner.hpp"

#include <stdexcept>

#include "npcg/dense.hpp"

namespace npcg {

namespace {

void check_length(const Vector& v, Index n, const char* context) {
  if (v.size() != n) throw std::invalid_argument(std::string(context) + ": length mismatch");
}

}  // namespace

Vector NystromPreconditioner::apply(const Vector& v) const {
  check_length(v, dim(), "NystromPreconditioner - apply");
  if (size() == 0) return v;
  const Vector t = u.transpose() * v;
  // P v = v + U ((Lambda + mu)/(lambda_ell + mu) - 1) t, elementwise on t.
  const Vector scaled =
      ((lambda.array() + mu) / (lambda_ell + mu) - 1.0).matrix().cwiseProduct(t);
  return v + u * scaled;
}

Vector NystromPreconditioner::apply_inverse(const Vector& r) const {
  check_length(r, dim(), "NystromPreconditioner - apply_inverse");
  if (size() == 0) return r;
  const Vector t = u.transpose() * r;
  // P^-1 r = r + U ((lambda_ell + mu)/(Lambda + mu) - 1) t.  When Lambda is
  // constant the ratio is exactly 1 and the correction vanishes bitwise.
  const Vector scaled =
      ((lambda_ell + mu) / (lambda.array() + mu) - 1.0).matrix().cwiseProduct(t);
  return r + u * scaled;
}

Matrix NystromPreconditioner::apply_inverse_block(const Matrix& r) const {
  if (r.rows() != dim())
    throw std::invalid_argument("NystromPreconditioner - apply_inverse_block: row mismatch");
  if (size() == 0) return r;
  const Matrix t = u.transpose() * r;
  const Vector gain = ((lambda_ell + mu) / (lambda.array() + mu) - 1.0).matrix();
  return r + u * (gain.asDiagonal() * t);
}

Matrix NystromPreconditioner::materialize() const {
  const Index n = dim();
  Matrix p = Matrix::Identity(n, n);
  if (size() == 0) return p;
  const Vector gain = ((lambda.array() + mu) / (lambda_ell + mu) - 1.0).matrix();
  p += u * gain.asDiagonal() * u.transpose();
  return p;
}

Vector OptimalPreconditioner::apply(const Vector& v) const {
  check_length(v, dim(), "OptimalPreconditioner - apply");
  const Vector t = v_ell.transpose() * v;
  const Vector scaled =
      ((lambda_ell.array() + mu) / (lambda_next + mu) - 1.0).matrix().cwiseProduct(t);
  return v + v_ell * scaled;
}

Vector OptimalPreconditioner::apply_inverse(const Vector& r) const {
  check_length(r, dim(), "OptimalPreconditioner - apply_inverse");
  const Vector t = v_ell.transpose() * r;
  const Vector scaled =
      ((lambda_next + mu) / (lambda_ell.array() + mu) - 1.0).matrix().cwiseProduct(t);
  return r + v_ell * scaled;
}

Matrix OptimalPreconditioner::materialize() const {
  const Index n = dim();
  Matrix p = Matrix::Identity(n, n);
  const Vector gain = ((lambda_ell.array() + mu) / (lambda_next + mu) - 1.0).matrix();
  p += v_ell * gain.asDiagonal() * v_ell.transpose();
  return p;
}

NystromPreconditioner build_preconditioner(const NystromApproximation& approx, double mu) {
  if (!(mu > 0.0))
    throw std::invalid_argument("build_preconditioner: mu must be > 0");
  NystromPreconditioner p;
  p.u = approx.u;
  p.lambda = approx.lambda;
  p.lambda_ell = approx.lambda.size() == 0 ? 0.0 : approx.lambda(approx.lambda.size() - 1);
  p.mu = mu;
  return p;
}

OptimalPreconditioner optimal_preconditioner(const Matrix& a, Index ell, double mu) {
  const Index n = a.rows();
  if (ell < 1 || ell >= n)
    throw std::invalid_argument("optimal_preconditioner: need 1 <= ell < n");
  const dense::Eigendecomposition eig = dense::sym_eig(a);
  OptimalPreconditioner p;
  p.v_ell = eig.vectors.leftCols(ell);
  p.lambda_ell = eig.values.head(ell);
  p.lambda_next = eig.values(ell);
  p.mu = mu;
  return p;
}

Vector woodbury_inverse_apply(const Matrix& u, const Vector& lambda, double mu,
                              const Vector& b) {
  if (!(mu > 0.0))
    throw std::invalid_argument("woodbury_inverse_apply: mu must be > 0");
  if (u.rows() != b.size() || u.cols() != lambda.size())
    throw std::invalid_argument("woodbury_inverse_apply: shape mismatch");
  if (u.cols() == 0) return b / mu;
  const Vector t = u.transpose() * b;
  const Vector core = ((lambda.array() + mu).inverse()).matrix().cwiseProduct(t);
  return u * core + (b - u * t) / mu;
}

Vector sketch_and_solve(const LinearOperator& op, const Vector& b, double mu,
                        Index ell, Rng& rng) {
  if (!(mu > 0.0)) throw std::invalid_argument("sketch_and_solve: mu must be > 0");
  const NystromApproximation approx = randomized_nystrom(op, ell, rng);
  return woodbury_inverse_apply(approx.u, approx.lambda, mu, b);
}

}  // namespace npcg
