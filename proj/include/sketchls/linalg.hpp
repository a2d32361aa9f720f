#pragma once

#include "sketchls/types.hpp"

#include <Eigen/QR>

namespace sketchls {

// Exact least-squares solution via column-pivoted QR of A. Throws RankError
// if A is (numerically) column rank-deficient.
Vector solve_exact_ls(const LSProblem& problem);

// Pivoted QR factorization of a sketched m x d matrix, used to solve systems
// against the sketched Gram matrix (SA)'(SA) without forming it. With
// SA P = Q R the Gram matrix is P R'R P', so a solve is two triangular
// solves plus permutations.
class SketchedGram {
 public:
  explicit SketchedGram(const Matrix& A_sketched);

  bool rank_deficient() const { return rank_deficient_; }

  // Solves ((SA)'(SA)) x = rhs; only valid when !rank_deficient().
  Vector solve(const Vector& rhs) const;

 private:
  Eigen::ColPivHouseholderQR<Matrix> qr_;
  bool rank_deficient_ = false;
};

namespace detail {

struct LstsqOutcome {
  Vector x;
  bool rank_deficient;
};

// Least-squares solve via column-pivoted QR. Reports rank deficiency instead
// of solving through it. warm_start exists for interface parity with
// iterative sub-solvers; the direct method does not use it.
LstsqOutcome lstsq_qr(const Matrix& M, const Vector& rhs,
                      const Vector* warm_start = nullptr);

// Minimum-norm least-squares solution via complete orthogonal decomposition;
// defined for any rank.
Vector lstsq_minimum_norm(const Matrix& M, const Vector& rhs);

bool qr_rank_deficient(const Eigen::ColPivHouseholderQR<Matrix>& qr);

}  // namespace detail

}  // namespace sketchls
