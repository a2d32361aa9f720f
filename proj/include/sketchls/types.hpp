#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sketchls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Relative threshold below which a triangular factor's smallest diagonal
// entry marks the factored matrix as rank-deficient.
inline constexpr double kRankTolerance = 1e-12;

// A matrix that must have full column rank does not.
class RankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary problem file is malformed (bad magic, version, or truncation).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text problem file is malformed; the message names the offending line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Overdetermined least-squares instance min_x ||A x - b||_2 with n >= d >= 1.
// The matrix must have full column rank and all entries must be finite; both
// are checked at construction. Instances are immutable. A'A and A'b are
// precomputed so that residual gradients A'(Ax - b) cost O(d^2) afterwards.
class LSProblem {
 public:
  LSProblem(Matrix A, Vector b);

  Index n() const { return A_.rows(); }
  Index d() const { return A_.cols(); }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const Matrix& AtA() const { return AtA_; }
  const Vector& Atb() const { return Atb_; }

 private:
  Matrix A_;
  Vector b_;
  Matrix AtA_;
  Vector Atb_;
};

}  // namespace sketchls
