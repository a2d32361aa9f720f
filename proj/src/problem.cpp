#include "sketchls/types.hpp"

#include "sketchls/linalg.hpp"

#include <utility>

namespace sketchls {

LSProblem::LSProblem(Matrix A, Vector b)
    : A_(std::move(A)), b_(std::move(b)) {
  if (A_.cols() < 1 || A_.rows() < A_.cols()) {
    throw std::invalid_argument(
        "LSProblem: need n >= d >= 1, got n=" + std::to_string(A_.rows()) +
        ", d=" + std::to_string(A_.cols()));
  }
  if (b_.size() != A_.rows()) {
    throw std::invalid_argument(
        "LSProblem: b has " + std::to_string(b_.size()) + " entries, A has " +
        std::to_string(A_.rows()) + " rows");
  }
  if (!A_.allFinite() || !b_.allFinite()) {
    throw std::invalid_argument("LSProblem: entries must be finite");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(A_);
  if (detail::qr_rank_deficient(qr)) {
    throw RankError("LSProblem: matrix does not have full column rank");
  }
  AtA_.noalias() = A_.transpose() * A_;
  Atb_.noalias() = A_.transpose() * b_;
}

}  // namespace sketchls
