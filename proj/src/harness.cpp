#include "sketchls/harness.hpp"

#include "sketchls/linalg.hpp"
#include "sketchls/parallel.hpp"
#include "sketchls/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <utility>

namespace sketchls {

namespace {

constexpr uint64_t kTagTrial = 6;
constexpr uint64_t kTagSketchDraw = 7;
constexpr uint64_t kTagBootstrap = 8;

SketchFactory factory_or_default(const SketchFactory& factory) {
  if (factory) return factory;
  return [](SketchKind kind, Index m, Index n, uint64_t seed) {
    return make_sketch(kind, m, n, seed);
  };
}

void check_experiment_params(const LSProblem& problem, Index m, double alpha,
                             int B, int trials, const char* where) {
  if (trials < 1) {
    throw std::invalid_argument(std::string(where) + ": need trials >= 1");
  }
  if (B < 1) {
    throw std::invalid_argument(std::string(where) + ": need B >= 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(std::string(where) +
                                ": alpha must lie in (0, 1)");
  }
  if (m <= problem.d() || m > problem.n()) {
    throw std::invalid_argument(
        std::string(where) + ": sketch size m=" + std::to_string(m) +
        " must satisfy d < m <= n (d=" + std::to_string(problem.d()) +
        ", n=" + std::to_string(problem.n()) + ")");
  }
}

// Column `trial` of each matrix holds that trial's results, so aggregation
// never depends on the execution schedule.
struct TrialTable {
  Matrix errors;     // grid point x trial: true error of the fresh sketch
  Matrix estimates;  // grid point x trial: (extrapolated) estimate
};

CoverageRow aggregate_row(long long grid_value, const Matrix& errors,
                          const Matrix& estimates, Index gi, double alpha,
                          int trials) {
  std::vector<double> errs(static_cast<size_t>(trials));
  for (int t = 0; t < trials; ++t) errs[static_cast<size_t>(t)] = errors(gi, t);

  CoverageRow row;
  row.grid_value = grid_value;
  row.trials = trials;
  row.benchmark_quantile = empirical_quantile(errs, 1.0 - alpha);

  double mean = 0.0;
  for (int t = 0; t < trials; ++t) mean += estimates(gi, t);
  mean /= trials;
  row.extrap_mean = mean;

  double ssq = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double dev = estimates(gi, t) - mean;
    ssq += dev * dev;
  }
  row.extrap_std = trials > 1 ? std::sqrt(ssq / (trials - 1)) : 0.0;

  int covered = 0;
  for (int t = 0; t < trials; ++t) {
    if (errors(gi, t) <= estimates(gi, t)) ++covered;
  }
  row.coverage = static_cast<double>(covered) / trials;
  return row;
}

}  // namespace

CoverageReport run_cs_experiment(const LSProblem& problem, SketchKind kind,
                                 std::vector<Index> m_grid, Index m0,
                                 double alpha, int B, int trials,
                                 const NormSpec& norm, uint64_t seed,
                                 const SketchFactory& factory) {
  if (m_grid.empty()) {
    throw std::invalid_argument("run_cs_experiment: empty sketch-size grid");
  }
  std::sort(m_grid.begin(), m_grid.end());
  m_grid.erase(std::unique(m_grid.begin(), m_grid.end()), m_grid.end());
  if (m0 != m_grid.front()) {
    throw std::invalid_argument(
        "run_cs_experiment: m0=" + std::to_string(m0) +
        " must be the smallest grid point (grid starts at " +
        std::to_string(m_grid.front()) + ")");
  }
  for (const Index m : m_grid) {
    check_experiment_params(problem, m, alpha, B, trials,
                            "run_cs_experiment");
  }
  const SketchFactory make = factory_or_default(factory);
  const Vector x_opt = solve_exact_ls(problem);
  const Index grid_size = static_cast<Index>(m_grid.size());

  TrialTable table{Matrix::Zero(grid_size, trials),
                   Matrix::Zero(grid_size, trials)};
  parallel_for(trials, [&](int64_t trial) {
    const uint64_t trial_seed =
        rng::derive_seed(seed, kTagTrial, static_cast<uint64_t>(trial));
    Index current_m = 0;
    try {
      std::optional<CSResult> at_m0;
      for (Index gi = 0; gi < grid_size; ++gi) {
        current_m = m_grid[static_cast<size_t>(gi)];
        const SketchOperator op =
            make(kind, current_m, problem.n(),
                 rng::derive_seed(trial_seed, kTagSketchDraw,
                                  static_cast<uint64_t>(gi)));
        CSResult cs = classic_sketch(problem, op);
        table.errors(gi, trial) = norm_eval(norm, cs.x_tilde - x_opt);
        if (gi == 0) at_m0.emplace(std::move(cs));
      }
      current_m = m0;
      const ErrorEstimate est = bootstrap_cs(
          at_m0->A_tilde, at_m0->b_tilde, at_m0->x_tilde, B, alpha, norm,
          rng::derive_seed(trial_seed, kTagBootstrap, 0));
      const SketchSizeModel model{m0, est.epsilon};
      for (Index gi = 0; gi < grid_size; ++gi) {
        table.estimates(gi, trial) =
            extrapolate_m(model, m_grid[static_cast<size_t>(gi)]);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("run_cs_experiment: trial " +
                               std::to_string(trial) + ", m=" +
                               std::to_string(current_m) + ": " + e.what());
    }
  });

  CoverageReport report;
  report.experiment = ExperimentKind::CS;
  report.rows.reserve(static_cast<size_t>(grid_size));
  for (Index gi = 0; gi < grid_size; ++gi) {
    report.rows.push_back(
        aggregate_row(static_cast<long long>(m_grid[static_cast<size_t>(gi)]),
                      table.errors, table.estimates, gi, alpha, trials));
  }
  return report;
}

CoverageReport run_ihs_experiment(const LSProblem& problem, SketchKind kind,
                                  Index m, int t_max, double alpha, int B,
                                  int trials, const NormSpec& norm,
                                  uint64_t seed, const SketchFactory& factory) {
  if (t_max < 3) {
    throw std::invalid_argument(
        "run_ihs_experiment: need t_max >= 3 (two anchor estimates plus at "
        "least one extrapolated row)");
  }
  check_experiment_params(problem, m, alpha, B, trials, "run_ihs_experiment");
  const SketchFactory make = factory_or_default(factory);
  const Vector x_opt = solve_exact_ls(problem);

  TrialTable table{Matrix::Zero(t_max, trials), Matrix::Zero(t_max, trials)};
  parallel_for(trials, [&](int64_t trial) {
    const uint64_t trial_seed =
        rng::derive_seed(seed, kTagTrial, static_cast<uint64_t>(trial));
    try {
      std::vector<SketchOperator> ops;
      ops.reserve(static_cast<size_t>(t_max));
      for (int i = 1; i <= t_max; ++i) {
        ops.push_back(make(kind, m, problem.n(),
                           rng::derive_seed(trial_seed, kTagSketchDraw,
                                            static_cast<uint64_t>(i))));
      }
      const Vector x0 = Vector::Zero(problem.d());
      const IHSTrace full = ihs_run(problem, ops, x0);
      for (int i = 1; i <= t_max; ++i) {
        table.errors(i - 1, trial) =
            norm_eval(norm, full.iterates[static_cast<size_t>(i)] - x_opt);
      }

      // Anchor estimates after one and two iterations. Re-running the
      // prefixes with the same operators reproduces the full trajectory's
      // leading iterates exactly.
      const IHSTrace t1 =
          ihs_run(problem, std::span(ops.data(), 1), x0);
      const IHSTrace t2 =
          ihs_run(problem, std::span(ops.data(), 2), x0);
      const ErrorEstimate est1 = bootstrap_ihs(
          t1.A_tilde_t, t1.g_prev, t1.iterates[0], t1.iterates[1], B, alpha,
          norm, rng::derive_seed(trial_seed, kTagBootstrap, 1));
      const ErrorEstimate est2 = bootstrap_ihs(
          t2.A_tilde_t, t2.g_prev, t2.iterates[1], t2.iterates[2], B, alpha,
          norm, rng::derive_seed(trial_seed, kTagBootstrap, 2));
      table.estimates(0, trial) = est1.epsilon;
      table.estimates(1, trial) = est2.epsilon;
      if (est1.epsilon > 0.0 && est2.epsilon > 0.0) {
        const GeometricModel fit = fit_geometric(est1.epsilon, est2.epsilon);
        for (int i = 3; i <= t_max; ++i) {
          table.estimates(i - 1, trial) = extrapolate_t(fit, i);
        }
      }
      // Degenerate anchors (exactly zero) leave the extrapolated rows at
      // zero: the fitted decay of an already-exact iterate is vacuous.
    } catch (const std::exception& e) {
      throw std::runtime_error("run_ihs_experiment: trial " +
                               std::to_string(trial) + ": " + e.what());
    }
  });

  CoverageReport report;
  report.experiment = ExperimentKind::IHS;
  report.rows.reserve(static_cast<size_t>(t_max));
  for (int i = 1; i <= t_max; ++i) {
    report.rows.push_back(aggregate_row(i, table.errors, table.estimates,
                                        i - 1, alpha, trials));
  }
  return report;
}

std::string format_g17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string to_csv(const CoverageReport& report) {
  std::string out = report.experiment == ExperimentKind::CS
                        ? "m,benchmark_quantile,extrap_mean,extrap_std,"
                          "coverage,trials\n"
                        : "iteration,benchmark_quantile,extrap_mean,"
                          "extrap_std,coverage,trials\n";
  for (const CoverageRow& row : report.rows) {
    out += std::to_string(row.grid_value);
    out += ',';
    out += format_g17(row.benchmark_quantile);
    out += ',';
    out += format_g17(row.extrap_mean);
    out += ',';
    out += format_g17(row.extrap_std);
    out += ',';
    out += format_g17(row.coverage);
    out += ',';
    out += std::to_string(row.trials);
    out += '\n';
  }
  return out;
}

namespace {

Index parse_positive_integer(std::string_view text, const char* what) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.begin(), text.end(), value);
  if (ec != std::errc{} || ptr != text.end() || value < 1) {
    throw std::invalid_argument(std::string("parse_sketch_size: bad ") +
                                what + " '" + std::string(text) + "'");
  }
  return static_cast<Index>(value);
}

}  // namespace

Index parse_sketch_size(std::string_view text, Index d) {
  if (text.empty()) {
    throw std::invalid_argument("parse_sketch_size: empty size");
  }
  if (text.back() == 'd' || text.back() == 'D') {
    const Index factor =
        parse_positive_integer(text.substr(0, text.size() - 1), "multiplier");
    if (d < 1) {
      throw std::invalid_argument(
          "parse_sketch_size: d-relative size needs a known problem width");
    }
    return factor * d;
  }
  return parse_positive_integer(text, "size");
}

std::vector<Index> parse_grid(std::string_view text, Index d) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    const size_t colon = text.find(':', start);
    if (colon == std::string_view::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, colon - start));
    start = colon + 1;
  }
  if (parts.size() == 1) {
    return {parse_sketch_size(parts[0], d)};
  }
  if (parts.size() != 3) {
    throw std::invalid_argument(
        "parse_grid: expected <start>:<stop>:<step> or a single size, got '" +
        std::string(text) + "'");
  }
  const Index lo = parse_sketch_size(parts[0], d);
  const Index hi = parse_sketch_size(parts[1], d);
  const Index step = parse_sketch_size(parts[2], d);
  if (lo > hi) {
    throw std::invalid_argument("parse_grid: start exceeds stop in '" +
                                std::string(text) + "'");
  }
  std::vector<Index> grid;
  for (Index m = lo; m <= hi; m += step) grid.push_back(m);
  return grid;
}

}  // namespace sketchls
