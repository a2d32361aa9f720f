#include "sketchls/linalg.hpp"

#include <utility>

namespace sketchls {

namespace detail {

bool qr_rank_deficient(const Eigen::ColPivHouseholderQR<Matrix>& qr) {
  const Index d = qr.matrixQR().cols();
  if (qr.matrixQR().rows() < d) return true;
  const auto diag = qr.matrixQR().diagonal().head(d);
  const double largest = diag.cwiseAbs().maxCoeff();
  const double smallest = diag.cwiseAbs().minCoeff();
  // largest == 0 (zero matrix) falls through to deficient.
  return !(smallest > kRankTolerance * largest) || largest == 0.0;
}

LstsqOutcome lstsq_qr(const Matrix& M, const Vector& rhs,
                      const Vector* /*warm_start*/) {
  Eigen::ColPivHouseholderQR<Matrix> qr(M);
  if (qr_rank_deficient(qr)) {
    return {Vector::Zero(M.cols()), true};
  }
  return {qr.solve(rhs), false};
}

Vector lstsq_minimum_norm(const Matrix& M, const Vector& rhs) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  return cod.solve(rhs);
}

}  // namespace detail

Vector solve_exact_ls(const LSProblem& problem) {
  auto out = detail::lstsq_qr(problem.A(), problem.b());
  if (out.rank_deficient) {
    throw RankError("solve_exact_ls: matrix does not have full column rank");
  }
  return std::move(out.x);
}

SketchedGram::SketchedGram(const Matrix& A_sketched) : qr_(A_sketched) {
  rank_deficient_ = detail::qr_rank_deficient(qr_);
}

Vector SketchedGram::solve(const Vector& rhs) const {
  // With SA P = Q R the system is P R'R P' x = rhs.
  const Index d = qr_.matrixQR().cols();
  const auto R = qr_.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  Vector y = qr_.colsPermutation().transpose() * rhs;
  Vector z = R.transpose().solve(y);
  Vector w = R.solve(z);
  return qr_.colsPermutation() * w;
}

}  // namespace sketchls
