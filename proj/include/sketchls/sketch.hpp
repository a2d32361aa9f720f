#pragma once

#include "sketchls/types.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sketchls {

enum class SketchKind { GaussianIID, RademacherIID, SRHT, UniformRowSample };

// A random row-compression operator S mapping n-row arrays to m-row arrays,
// normalized so that E[S'S] = I_n over the seed distribution.
//
// Gaussian and Rademacher entries are never stored: column j of S is
// regenerated from substream (seed, j) at each application, so construction
// is O(1) and the operator applies identically regardless of evaluation
// order. SRHT and uniform row sampling store their sampled structure (sign
// flips, row indices) at construction.
struct SketchOperator {
  SketchKind kind = SketchKind::GaussianIID;
  Index m = 0;     // output (sketch) rows
  Index n = 0;     // input (ambient) rows
  uint64_t seed = 0;

  Index padded_n = 0;              // SRHT only: power of two >= n
  Vector signs;                    // SRHT only: +-1 diagonal, length padded_n
  std::vector<Index> row_indices;  // SRHT / row sampling: m sampled rows
};

// Builds an operator of the given kind; deterministic in (kind, m, n, seed).
// Requires 1 <= m <= n. Independent of any right-hand-side dimension.
SketchOperator make_sketch(SketchKind kind, Index m, Index n, uint64_t seed);

// Computes S * M for an n-row matrix M. The SRHT path runs in
// O(cols(M) * padded_n * log(padded_n)) via the fast transform.
Matrix apply_sketch(const SketchOperator& op, const Matrix& M);
Vector apply_sketch(const SketchOperator& op, const Vector& v);

// In-place unnormalized Walsh-Hadamard transform; the length must be a
// power of two.
void fwht_inplace(std::span<double> data);

// Parses "gaussian", "rademacher", "srht", "rowsample".
SketchKind parse_sketch_kind(std::string_view text);
std::string_view sketch_kind_name(SketchKind kind);

}  // namespace sketchls
