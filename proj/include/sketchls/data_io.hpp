#pragma once

#include "sketchls/types.hpp"

#include <cstdint>
#include <filesystem>

namespace sketchls {

enum class Conditioning { Ill, Well };

// Recipe for a synthetic test problem A = U diag(sigma) V', b = A x* + z.
// U is the thin orthonormal factor of an n x d matrix with heavy-tailed
// correlated rows, V is a random d x d orthogonal matrix, and sigma fixes
// the conditioning: Ill spaces singular values geometrically over six
// decades (cond(A'A) = 1e12), Well spaces them linearly on [0.1, 1]
// (cond(A'A) = 1e2). x* is 1 on the leading and trailing 20% of
// coordinates and 0.1 in between; z is i.i.d. N(0, noise_tau^2).
struct SyntheticSpec {
  Index n = 0;
  Index d = 0;  // >= 2
  Conditioning conditioning = Conditioning::Well;
  double noise_tau = 1e-3;  // >= 0
  uint64_t seed = 0;
};

// The generated problem plus its ground-truth factors, for validation.
struct SyntheticFactors {
  LSProblem problem;
  Matrix U;       // n x d, orthonormal columns
  Matrix V;       // d x d, orthogonal
  Vector sigma;   // singular values, decreasing
  Vector x_star;  // planted coefficient vector
};

SyntheticFactors gen_synthetic_full(const SyntheticSpec& spec);
LSProblem gen_synthetic(const SyntheticSpec& spec);

// Reads a dense problem from whitespace-separated "label idx:value ..."
// lines. Feature indices are 1-based and must be strictly increasing within
// a line; the width is the largest index seen. Malformed input raises
// ParseError naming the line number.
LSProblem load_libsvm(const std::filesystem::path& path);

// Binary problem container: magic "SKLS", format version (u16), n (u64),
// d (u64), then A row-major and b, all little-endian IEEE doubles.
// Round-trips bit for bit.
void write_problem(const LSProblem& problem, const std::filesystem::path& path);
LSProblem read_problem(const std::filesystem::path& path);

}  // namespace sketchls
