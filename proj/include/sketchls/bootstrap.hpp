#pragma once

#include "sketchls/norms.hpp"
#include "sketchls/rng.hpp"
#include "sketchls/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sketchls {

// A-posteriori error estimate: the (1 - alpha) empirical quantile of B
// bootstrap replicate deviations, plus the raw replicates for diagnostics.
// epsilon is always an element of replicates.
struct ErrorEstimate {
  double epsilon = 0.0;
  double alpha = 0.0;
  int B = 0;
  std::vector<double> replicates;  // in replicate order, unsorted
  NormSpec norm;
  uint64_t seed = 0;
  int degenerate_count = 0;  // rank-deficient resamples encountered
};

// Smallest sample element c with #{v_i <= c} / k >= level. Requires a
// nonempty sample and level in (0, 1).
double empirical_quantile(std::span<const double> values, double level);

// m i.i.d. draws from {0, ..., m-1} with replacement.
std::vector<Index> resample_indices(Index m, rng::SplitMix64& stream);

// Error estimate for a sketch-and-solve solution x_tilde obtained from the
// sketched data (A_tilde, b_tilde). Each replicate resamples m rows of
// (A_tilde, b_tilde) jointly, re-solves the small least-squares problem, and
// records ||x* - x_tilde|| in the chosen norm. Runs entirely on m x d data;
// cost is independent of the ambient row count. Replicate l depends only on
// (seed, l), so replicates can run in any order or in parallel with
// identical results.
//
// A rank-deficient resample is redrawn from the replicate's next substream,
// up to 10 retries, then the replicate falls back to the minimum-norm
// solution of its last resample; every deficient draw increments
// degenerate_count.
ErrorEstimate bootstrap_cs(const Eigen::Ref<const Matrix>& A_tilde,
                           const Eigen::Ref<const Vector>& b_tilde,
                           const Eigen::Ref<const Vector>& x_tilde, int B,
                           double alpha, const NormSpec& norm, uint64_t seed);

// Error estimate for the last iterate of an iterative Hessian-sketch run.
// Each replicate resamples the rows of A_tilde_t only, re-solves the final
// iteration's quadratic subproblem from x_prev with the original gradient
// g_prev, and records ||x* - x_last||. Same retry and determinism behavior
// as bootstrap_cs; the fallback is the minimum-norm solution of the
// resampled (singular) Gram system.
ErrorEstimate bootstrap_ihs(const Eigen::Ref<const Matrix>& A_tilde_t,
                            const Eigen::Ref<const Vector>& g_prev,
                            const Eigen::Ref<const Vector>& x_prev,
                            const Eigen::Ref<const Vector>& x_last, int B,
                            double alpha, const NormSpec& norm, uint64_t seed);

}  // namespace sketchls
