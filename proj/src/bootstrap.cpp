#include "sketchls/bootstrap.hpp"

#include "sketchls/linalg.hpp"
#include "sketchls/parallel.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace sketchls {

namespace {

constexpr uint64_t kTagReplicate = 5;
constexpr int kMaxRetries = 10;

Matrix gather_rows(const Eigen::Ref<const Matrix>& M,
                   const std::vector<Index>& idx) {
  Matrix out(static_cast<Index>(idx.size()), M.cols());
  for (size_t j = 0; j < idx.size(); ++j) {
    out.row(static_cast<Index>(j)) = M.row(idx[j]);
  }
  return out;
}

Vector gather_entries(const Eigen::Ref<const Vector>& v,
                      const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) {
    out[static_cast<Index>(j)] = v[idx[j]];
  }
  return out;
}

void check_estimate_params(int B, double alpha) {
  if (B < 1) {
    throw std::invalid_argument("bootstrap: need B >= 1, got " +
                                std::to_string(B));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("bootstrap: alpha must lie in (0, 1), got " +
                                std::to_string(alpha));
  }
}

ErrorEstimate finish_estimate(std::vector<double> replicates,
                              std::vector<int> degenerate, int B,
                              double alpha, const NormSpec& norm,
                              uint64_t seed) {
  ErrorEstimate est;
  est.alpha = alpha;
  est.B = B;
  est.norm = norm;
  est.seed = seed;
  est.degenerate_count =
      std::accumulate(degenerate.begin(), degenerate.end(), 0);
  est.replicates = std::move(replicates);
  est.epsilon = empirical_quantile(est.replicates, 1.0 - alpha);
  return est;
}

}  // namespace

double empirical_quantile(std::span<const double> values, double level) {
  if (values.empty()) {
    throw std::invalid_argument("empirical_quantile: empty sample");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument(
        "empirical_quantile: level must lie in (0, 1), got " +
        std::to_string(level));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double k = static_cast<double>(sorted.size());
  for (size_t j = 0; j < sorted.size(); ++j) {
    // sorted[j] dominates exactly j+1 elements (counting ties to its left,
    // which compare equal and so are also <= sorted[j]).
    if (static_cast<double>(j + 1) / k >= level) return sorted[j];
  }
  return sorted.back();  // unreachable: k/k = 1 >= level
}

std::vector<Index> resample_indices(Index m, rng::SplitMix64& stream) {
  if (m < 1) {
    throw std::invalid_argument("resample_indices: need m >= 1, got " +
                                std::to_string(m));
  }
  std::vector<Index> idx(static_cast<size_t>(m));
  for (auto& v : idx) {
    v = static_cast<Index>(stream.next_below(static_cast<uint64_t>(m)));
  }
  return idx;
}

ErrorEstimate bootstrap_cs(const Eigen::Ref<const Matrix>& A_tilde,
                           const Eigen::Ref<const Vector>& b_tilde,
                           const Eigen::Ref<const Vector>& x_tilde, int B,
                           double alpha, const NormSpec& norm,
                           uint64_t seed) {
  check_estimate_params(B, alpha);
  const Index m = A_tilde.rows();
  const Index d = A_tilde.cols();
  if (m < 1 || d < 1) {
    throw std::invalid_argument("bootstrap_cs: empty sketched matrix");
  }
  if (b_tilde.size() != m) {
    throw std::invalid_argument("bootstrap_cs: b_tilde has " +
                                std::to_string(b_tilde.size()) +
                                " entries, expected " + std::to_string(m));
  }
  if (x_tilde.size() != d) {
    throw std::invalid_argument("bootstrap_cs: x_tilde has " +
                                std::to_string(x_tilde.size()) +
                                " entries, expected " + std::to_string(d));
  }
  const Vector warm(x_tilde);  // handed to the replicate solver

  std::vector<double> replicates(static_cast<size_t>(B), 0.0);
  std::vector<int> degenerate(static_cast<size_t>(B), 0);
  parallel_for(B, [&](int64_t l) {
    const uint64_t replicate_seed =
        rng::derive_seed(seed, kTagReplicate, static_cast<uint64_t>(l));
    Vector x_star;
    bool solved = false;
    std::vector<Index> idx;
    for (int attempt = 0; attempt <= kMaxRetries && !solved; ++attempt) {
      rng::SplitMix64 stream(
          rng::derive_seed(replicate_seed, static_cast<uint64_t>(attempt)));
      idx = resample_indices(m, stream);
      auto out = detail::lstsq_qr(gather_rows(A_tilde, idx),
                                  gather_entries(b_tilde, idx), &warm);
      if (out.rank_deficient) {
        ++degenerate[static_cast<size_t>(l)];
        continue;
      }
      x_star = std::move(out.x);
      solved = true;
    }
    if (!solved) {
      x_star = detail::lstsq_minimum_norm(gather_rows(A_tilde, idx),
                                          gather_entries(b_tilde, idx));
    }
    replicates[static_cast<size_t>(l)] = norm_eval(norm, x_star - warm);
  });
  return finish_estimate(std::move(replicates), std::move(degenerate), B,
                         alpha, norm, seed);
}

ErrorEstimate bootstrap_ihs(const Eigen::Ref<const Matrix>& A_tilde_t,
                            const Eigen::Ref<const Vector>& g_prev,
                            const Eigen::Ref<const Vector>& x_prev,
                            const Eigen::Ref<const Vector>& x_last, int B,
                            double alpha, const NormSpec& norm,
                            uint64_t seed) {
  check_estimate_params(B, alpha);
  const Index m = A_tilde_t.rows();
  const Index d = A_tilde_t.cols();
  if (m < 1 || d < 1) {
    throw std::invalid_argument("bootstrap_ihs: empty sketched matrix");
  }
  if (g_prev.size() != d || x_prev.size() != d || x_last.size() != d) {
    throw std::invalid_argument(
        "bootstrap_ihs: gradient and iterates must all have d=" +
        std::to_string(d) + " entries");
  }
  const Vector gradient(g_prev);
  const Vector x_from(x_prev);
  const Vector x_ref(x_last);

  std::vector<double> replicates(static_cast<size_t>(B), 0.0);
  std::vector<int> degenerate(static_cast<size_t>(B), 0);
  parallel_for(B, [&](int64_t l) {
    const uint64_t replicate_seed =
        rng::derive_seed(seed, kTagReplicate, static_cast<uint64_t>(l));
    Vector x_star;
    bool solved = false;
    std::vector<Index> idx;
    for (int attempt = 0; attempt <= kMaxRetries && !solved; ++attempt) {
      rng::SplitMix64 stream(
          rng::derive_seed(replicate_seed, static_cast<uint64_t>(attempt)));
      idx = resample_indices(m, stream);
      SketchedGram gram(gather_rows(A_tilde_t, idx));
      if (gram.rank_deficient()) {
        ++degenerate[static_cast<size_t>(l)];
        continue;
      }
      x_star = x_from + gram.solve(-gradient);
      solved = true;
    }
    if (!solved) {
      // Minimum-norm step through the singular resampled Gram system.
      const Matrix A_star = gather_rows(A_tilde_t, idx);
      const Matrix G = A_star.transpose() * A_star;
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(G);
      x_star = x_from + cod.solve((-gradient).eval());
    }
    replicates[static_cast<size_t>(l)] = norm_eval(norm, x_star - x_ref);
  });
  return finish_estimate(std::move(replicates), std::move(degenerate), B,
                         alpha, norm, seed);
}

}  // namespace sketchls
