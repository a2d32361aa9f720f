#pragma once

#include "sketchls/bootstrap.hpp"
#include "sketchls/extrapolate.hpp"
#include "sketchls/solvers.hpp"
#include "sketchls/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace sketchls {

enum class ExperimentKind { CS, IHS };

// One grid point of a Monte Carlo coverage experiment. grid_value is the
// sketch size m (CS) or the iteration index i (IHS).
struct CoverageRow {
  long long grid_value = 0;
  double benchmark_quantile = 0.0;  // (1 - alpha) quantile of the true errors
  double extrap_mean = 0.0;         // mean of the per-trial estimates
  double extrap_std = 0.0;          // sample std; 0 when trials == 1
  double coverage = 0.0;  // fraction of trials with true error <= estimate
  int trials = 0;
};

struct CoverageReport {
  ExperimentKind experiment = ExperimentKind::CS;
  std::vector<CoverageRow> rows;
};

// Hook for substituting the operator constructor (e.g. exact embeddings in
// tests). Arguments are (kind, m, n, seed); empty means make_sketch.
using SketchFactory =
    std::function<SketchOperator(SketchKind, Index, Index, uint64_t)>;

// Monte Carlo coverage experiment for sketch-and-solve. Per trial: draw an
// independent sketch at every grid size and record the true error against
// the exact solution; bootstrap an error estimate from the m0 sketch (m0
// must be the smallest grid point) and extrapolate it across the grid.
// Trials are independent given (seed, trial) and run in parallel; reports
// are identical for any worker count.
CoverageReport run_cs_experiment(const LSProblem& problem, SketchKind kind,
                                 std::vector<Index> m_grid, Index m0,
                                 double alpha, int B, int trials,
                                 const NormSpec& norm, uint64_t seed,
                                 const SketchFactory& factory = {});

// Monte Carlo coverage experiment for iterative Hessian sketch at fixed m.
// Per trial: run t_max iterations and record per-iteration true errors;
// bootstrap estimates at iterations 1 and 2 (rows 1 and 2 report these
// directly), fit the geometric model, and extrapolate rows 3 .. t_max.
// Requires t_max >= 3.
CoverageReport run_ihs_experiment(const LSProblem& problem, SketchKind kind,
                                  Index m, int t_max, double alpha, int B,
                                  int trials, const NormSpec& norm,
                                  uint64_t seed,
                                  const SketchFactory& factory = {});

// CSV with header "m,benchmark_quantile,extrap_mean,extrap_std,coverage,
// trials" (CS) or "iteration,..." (IHS); floats carry 17 significant digits
// so values round-trip exactly.
std::string to_csv(const CoverageReport& report);

// Decimal with 17 significant digits; parses back to the identical double.
std::string format_g17(double value);

// Sketch sizes like "240" or "30d" (multiples of the problem width d).
Index parse_sketch_size(std::string_view text, Index d);

// Grids like "5d:30d:5d" (start:stop:step, inclusive) or a single size.
std::vector<Index> parse_grid(std::string_view text, Index d);

}  // namespace sketchls
