#include "sketchls/sketch.hpp"

#include "sketchls/rng.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sketchls {

namespace {

// Substream tags; each derivation site gets its own first-level tag so the
// streams never collide.
constexpr uint64_t kTagColumn = 1;  // (seed, kTagColumn, j): column j entries
constexpr uint64_t kTagSigns = 2;   // SRHT sign diagonal
constexpr uint64_t kTagRows = 3;    // SRHT / row-sample row draws

void fill_iid_column(const SketchOperator& op, Index col, double* out) {
  rng::SplitMix64 stream(
      rng::derive_seed(op.seed, kTagColumn, static_cast<uint64_t>(col)));
  const double scale = 1.0 / std::sqrt(static_cast<double>(op.m));
  if (op.kind == SketchKind::GaussianIID) {
    for (Index i = 0; i < op.m; ++i) out[i] = scale * stream.next_normal();
  } else {
    for (Index i = 0; i < op.m; ++i) {
      out[i] = stream.next_bit() ? scale : -scale;
    }
  }
}

// Dense i.i.d. kinds: regenerate S panel by panel and accumulate the
// product, so memory stays O(m * panel) no matter how large n is.
Matrix apply_dense_iid(const SketchOperator& op,
                       const Matrix& M) {
  constexpr Index kPanelCols = 128;
  Matrix out = Matrix::Zero(op.m, M.cols());
  Matrix panel(op.m, std::min(kPanelCols, op.n));
  for (Index j0 = 0; j0 < op.n; j0 += kPanelCols) {
    const Index width = std::min(kPanelCols, op.n - j0);
    for (Index j = 0; j < width; ++j) {
      fill_iid_column(op, j0 + j, panel.col(j).data());
    }
    out.noalias() += panel.leftCols(width) * M.middleRows(j0, width);
  }
  return out;
}

Matrix apply_srht(const SketchOperator& op, const Matrix& M) {
  Matrix out(op.m, M.cols());
  Vector work(op.padded_n);
  // (1/sqrt(padded_n)) from the normalized transform and sqrt(padded_n / m)
  // from the sampling step combine into 1/sqrt(m).
  const double scale = 1.0 / std::sqrt(static_cast<double>(op.m));
  for (Index c = 0; c < M.cols(); ++c) {
    work.head(op.n) = op.signs.head(op.n).cwiseProduct(M.col(c));
    work.tail(op.padded_n - op.n).setZero();
    fwht_inplace(std::span<double>(work.data(),
                                   static_cast<size_t>(op.padded_n)));
    for (Index j = 0; j < op.m; ++j) {
      out(j, c) = scale * work(op.row_indices[static_cast<size_t>(j)]);
    }
  }
  return out;
}

Matrix apply_row_sample(const SketchOperator& op,
                        const Matrix& M) {
  Matrix out(op.m, M.cols());
  const double scale =
      std::sqrt(static_cast<double>(op.n) / static_cast<double>(op.m));
  for (Index j = 0; j < op.m; ++j) {
    out.row(j) = scale * M.row(op.row_indices[static_cast<size_t>(j)]);
  }
  return out;
}

void check_operator(const SketchOperator& op, Index input_rows) {
  if (op.m < 1 || op.m > op.n) {
    throw std::invalid_argument("apply_sketch: operator needs 1 <= m <= n");
  }
  if (input_rows != op.n) {
    throw std::invalid_argument(
        "apply_sketch: input has " + std::to_string(input_rows) +
        " rows, operator expects " + std::to_string(op.n));
  }
  const bool sampled = op.kind == SketchKind::SRHT ||
                       op.kind == SketchKind::UniformRowSample;
  if (sampled) {
    if (op.row_indices.size() != static_cast<size_t>(op.m)) {
      throw std::invalid_argument("apply_sketch: operator holds " +
                                  std::to_string(op.row_indices.size()) +
                                  " row indices, expected m=" +
                                  std::to_string(op.m));
    }
    const Index bound =
        op.kind == SketchKind::SRHT ? op.padded_n : op.n;
    for (const Index r : op.row_indices) {
      if (r < 0 || r >= bound) {
        throw std::invalid_argument("apply_sketch: row index " +
                                    std::to_string(r) + " out of range");
      }
    }
  }
  if (op.kind == SketchKind::SRHT) {
    if (op.padded_n < op.n || !std::has_single_bit(
                                  static_cast<uint64_t>(op.padded_n))) {
      throw std::invalid_argument(
          "apply_sketch: padded_n must be a power of two >= n");
    }
    if (op.signs.size() != op.padded_n) {
      throw std::invalid_argument(
          "apply_sketch: sign diagonal must have padded_n entries");
    }
  }
}

}  // namespace

void fwht_inplace(std::span<double> data) {
  const size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument(
        "fwht_inplace: length must be a power of two, got " +
        std::to_string(n));
  }
  for (size_t h = 1; h < n; h <<= 1) {
    for (size_t i = 0; i < n; i += h << 1) {
      for (size_t j = i; j < i + h; ++j) {
        const double a = data[j];
        const double b = data[j + h];
        data[j] = a + b;
        data[j + h] = a - b;
      }
    }
  }
}

SketchOperator make_sketch(SketchKind kind, Index m, Index n, uint64_t seed) {
  if (m < 1 || m > n) {
    throw std::invalid_argument("make_sketch: need 1 <= m <= n, got m=" +
                                std::to_string(m) + ", n=" +
                                std::to_string(n));
  }
  SketchOperator op;
  op.kind = kind;
  op.m = m;
  op.n = n;
  op.seed = seed;
  switch (kind) {
    case SketchKind::GaussianIID:
    case SketchKind::RademacherIID:
      break;  // entries regenerate at application time
    case SketchKind::SRHT: {
      op.padded_n =
          static_cast<Index>(std::bit_ceil(static_cast<uint64_t>(n)));
      op.signs.resize(op.padded_n);
      rng::SplitMix64 sign_stream(rng::derive_seed(seed, kTagSigns, 0));
      for (Index i = 0; i < op.padded_n; ++i) {
        op.signs[i] = sign_stream.next_bit() ? 1.0 : -1.0;
      }
      rng::SplitMix64 row_stream(rng::derive_seed(seed, kTagRows, 0));
      op.row_indices.resize(static_cast<size_t>(m));
      for (auto& r : op.row_indices) {
        r = static_cast<Index>(
            row_stream.next_below(static_cast<uint64_t>(op.padded_n)));
      }
      break;
    }
    case SketchKind::UniformRowSample: {
      rng::SplitMix64 row_stream(rng::derive_seed(seed, kTagRows, 0));
      op.row_indices.resize(static_cast<size_t>(m));
      for (auto& r : op.row_indices) {
        r = static_cast<Index>(
            row_stream.next_below(static_cast<uint64_t>(n)));
      }
      break;
    }
  }
  return op;
}

Matrix apply_sketch(const SketchOperator& op,
                    const Matrix& M) {
  check_operator(op, M.rows());
  switch (op.kind) {
    case SketchKind::GaussianIID:
    case SketchKind::RademacherIID:
      return apply_dense_iid(op, M);
    case SketchKind::SRHT:
      return apply_srht(op, M);
    case SketchKind::UniformRowSample:
      return apply_row_sample(op, M);
  }
  throw std::logic_error("apply_sketch: unknown sketch kind");
}

Vector apply_sketch(const SketchOperator& op, const Vector& v) {
  Matrix as_matrix(v.size(), 1);
  as_matrix.col(0) = v;
  return apply_sketch(op, as_matrix).col(0);
}

SketchKind parse_sketch_kind(std::string_view text) {
  if (text == "gaussian") return SketchKind::GaussianIID;
  if (text == "rademacher") return SketchKind::RademacherIID;
  if (text == "srht") return SketchKind::SRHT;
  if (text == "rowsample") return SketchKind::UniformRowSample;
  throw std::invalid_argument(
      "parse_sketch_kind: unknown kind '" + std::string(text) +
      "' (expected gaussian, rademacher, srht, or rowsample)");
}

std::string_view sketch_kind_name(SketchKind kind) {
  switch (kind) {
    case SketchKind::GaussianIID:
      return "gaussian";
    case SketchKind::RademacherIID:
      return "rademacher";
    case SketchKind::SRHT:
      return "srht";
    case SketchKind::UniformRowSample:
      return "rowsample";
  }
  return "unknown";
}

}  // namespace sketchls
