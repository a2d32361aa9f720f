// Command-line front end: generate problems, run the sketched solvers,
// bootstrap error estimates, extrapolate them, and drive the Monte Carlo
// coverage experiments.

#include "CLI11.hpp"

#include "sketchls/bootstrap.hpp"
#include "sketchls/data_io.hpp"
#include "sketchls/extrapolate.hpp"
#include "sketchls/harness.hpp"
#include "sketchls/linalg.hpp"
#include "sketchls/norms.hpp"
#include "sketchls/sketch.hpp"
#include "sketchls/solvers.hpp"

#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace sketchls;

// Substream tag separating the bootstrap seed from the sketch seed, so
// "--seed S" fixes both without correlating them.
constexpr uint64_t kTagEstimate = 9;

// Problem files are either the native binary container (magic "SKLS") or
// LIBSVM text; sniff the first four bytes.
LSProblem load_data(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) {
    throw std::runtime_error("cannot open " + path);
  }
  char magic[4] = {};
  probe.read(magic, 4);
  const bool binary = probe.gcount() == 4 && std::memcmp(magic, "SKLS", 4) == 0;
  probe.close();
  return binary ? read_problem(path) : load_libsvm(path);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open " + out_path + " for writing");
  }
  out << text;
  if (!out.flush()) {
    throw std::runtime_error("write to " + out_path + " failed");
  }
}

void print_vector(const Vector& x) {
  std::string text;
  for (Index i = 0; i < x.size(); ++i) {
    text += format_g17(x[i]);
    text += '\n';
  }
  std::cout << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized sketched least-squares solvers with bootstrap "
               "error estimates"};
  app.require_subcommand(1);

  // ---- gen ----------------------------------------------------------
  struct {
    long long n = 0, d = 0;
    std::string cond = "well";
    double tau = 1e-3;
    uint64_t seed = 0;
    std::string out;
  } gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic problem");
  gen_cmd->add_option("--n", gen.n, "Rows")->required();
  gen_cmd->add_option("--d", gen.d, "Columns")->required();
  gen_cmd->add_option("--cond", gen.cond, "Conditioning: well or ill")
      ->check(CLI::IsMember({"well", "ill"}));
  gen_cmd->add_option("--tau", gen.tau, "Noise scale (default 0.001)");
  gen_cmd->add_option("--seed", gen.seed, "Master seed");
  gen_cmd->add_option("--out", gen.out, "Output .skls path")->required();
  gen_cmd->callback([&] {
    SyntheticSpec spec;
    spec.n = gen.n;
    spec.d = gen.d;
    spec.conditioning =
        gen.cond == "ill" ? Conditioning::Ill : Conditioning::Well;
    spec.noise_tau = gen.tau;
    spec.seed = gen.seed;
    write_problem(gen_synthetic(spec), gen.out);
    std::cerr << "wrote " << gen.out << " (n=" << gen.n << ", d=" << gen.d
              << ", cond=" << gen.cond << ", seed=" << gen.seed << ")\n";
  });

  // ---- solve --------------------------------------------------------
  struct {
    std::string data;
    std::string sketch = "gaussian";
    std::string m_text = "0";
    int t = 1;
    uint64_t seed = 0;
  } solve;
  auto* solve_cmd =
      app.add_subcommand("solve", "Solve a problem exactly or via sketching");
  solve_cmd->require_subcommand(1);
  auto add_solve_common = [&](CLI::App* sub, bool sketched) {
    sub->add_option("--data", solve.data, "Problem file (.skls or LIBSVM)")
        ->required();
    if (sketched) {
      sub->add_option("--m", solve.m_text, "Sketch size (e.g. 600 or 30d)")
          ->required();
      sub->add_option("--sketch", solve.sketch,
                      "gaussian, rademacher, srht, or rowsample");
      sub->add_option("--seed", solve.seed, "Sketch seed");
    }
  };
  auto* solve_exact = solve_cmd->add_subcommand("exact", "Exact QR solve");
  add_solve_common(solve_exact, false);
  solve_exact->callback([&] { print_vector(solve_exact_ls(load_data(solve.data))); });

  auto* solve_cs = solve_cmd->add_subcommand("cs", "Sketch-and-solve");
  add_solve_common(solve_cs, true);
  solve_cs->callback([&] {
    const LSProblem problem = load_data(solve.data);
    const auto op = make_sketch(parse_sketch_kind(solve.sketch),
                                parse_sketch_size(solve.m_text, problem.d()),
                                problem.n(), solve.seed);
    print_vector(classic_sketch(problem, op).x_tilde);
  });

  auto* solve_hs = solve_cmd->add_subcommand("hs", "One-shot Gram sketch");
  add_solve_common(solve_hs, true);
  solve_hs->callback([&] {
    const LSProblem problem = load_data(solve.data);
    const auto op = make_sketch(parse_sketch_kind(solve.sketch),
                                parse_sketch_size(solve.m_text, problem.d()),
                                problem.n(), solve.seed);
    print_vector(hessian_sketch(problem, op));
  });

  auto* solve_ihs =
      solve_cmd->add_subcommand("ihs", "Iterative Gram sketch");
  add_solve_common(solve_ihs, true);
  solve_ihs->add_option("--t", solve.t, "Iterations")->check(CLI::PositiveNumber);
  solve_ihs->callback([&] {
    const LSProblem problem = load_data(solve.data);
    const auto trace = ihs_run(problem, parse_sketch_kind(solve.sketch),
                               parse_sketch_size(solve.m_text, problem.d()),
                               solve.t, solve.seed);
    print_vector(trace.iterates.back());
  });

  // ---- estimate -----------------------------------------------------
  struct {
    std::string data;
    std::string m_text;
    std::string sketch = "gaussian";
    std::string norm = "l2";
    int B = 20;
    int t = 1;
    double alpha = 0.05;
    uint64_t seed = 0;
  } est;
  auto* est_cmd = app.add_subcommand(
      "estimate", "Bootstrap a-posteriori error estimate");
  est_cmd->require_subcommand(1);
  auto add_estimate_common = [&](CLI::App* sub) {
    sub->add_option("--data", est.data, "Problem file (.skls or LIBSVM)")
        ->required();
    sub->add_option("--m", est.m_text, "Sketch size (e.g. 600 or 30d)")
        ->required();
    sub->add_option("--sketch", est.sketch,
                    "gaussian, rademacher, srht, or rowsample");
    sub->add_option("--B", est.B, "Bootstrap replicates (default 20)");
    sub->add_option("--alpha", est.alpha, "Quantile tail level (default 0.05)");
    sub->add_option("--norm", est.norm, "l1, l2, linf, or lp:<p>");
    sub->add_option("--seed", est.seed, "Master seed");
  };
  auto* est_cs = est_cmd->add_subcommand(
      "cs", "Estimate for a sketch-and-solve solution");
  add_estimate_common(est_cs);
  est_cs->callback([&] {
    const LSProblem problem = load_data(est.data);
    const auto op = make_sketch(parse_sketch_kind(est.sketch),
                                parse_sketch_size(est.m_text, problem.d()),
                                problem.n(), est.seed);
    const CSResult cs = classic_sketch(problem, op);
    const ErrorEstimate out = bootstrap_cs(
        cs.A_tilde, cs.b_tilde, cs.x_tilde, est.B, est.alpha,
        parse_norm(est.norm), rng::derive_seed(est.seed, kTagEstimate, 0));
    std::cout << "epsilon " << format_g17(out.epsilon) << '\n'
              << "replicates " << out.B << '\n';
  });
  auto* est_ihs = est_cmd->add_subcommand(
      "ihs", "Estimate for the last iterate of an iterative run");
  add_estimate_common(est_ihs);
  est_ihs->add_option("--t", est.t, "Iterations")->check(CLI::PositiveNumber);
  est_ihs->callback([&] {
    const LSProblem problem = load_data(est.data);
    const auto trace = ihs_run(problem, parse_sketch_kind(est.sketch),
                               parse_sketch_size(est.m_text, problem.d()),
                               est.t, est.seed);
    const size_t last = trace.iterates.size() - 1;
    const ErrorEstimate out = bootstrap_ihs(
        trace.A_tilde_t, trace.g_prev, trace.iterates[last - 1],
        trace.iterates[last], est.B, est.alpha, parse_norm(est.norm),
        rng::derive_seed(est.seed, kTagEstimate, 0));
    std::cout << "epsilon " << format_g17(out.epsilon) << '\n'
              << "replicates " << out.B << '\n';
  });

  // ---- extrapolate --------------------------------------------------
  struct {
    long long m0 = 0, m = 0;
    double eps = 0.0, eps1 = 0.0, eps2 = 0.0, target = 0.0;
    int i = 0;
  } ext;
  auto* ext_cmd =
      app.add_subcommand("extrapolate", "Extend an estimate to other budgets");
  ext_cmd->require_subcommand(1);
  auto* ext_m = ext_cmd->add_subcommand(
      "m", "Sketch-size rule: eps * sqrt(m0 / m)");
  ext_m->add_option("--m0", ext.m0, "Anchor sketch size")->required();
  ext_m->add_option("--eps", ext.eps, "Estimate at m0")->required();
  ext_m->add_option("--m", ext.m, "Target sketch size")->required();
  ext_m->callback([&] {
    const SketchSizeModel model{static_cast<Index>(ext.m0), ext.eps};
    std::cout << format_g17(extrapolate_m(model, static_cast<Index>(ext.m)))
              << '\n';
  });
  auto* ext_t = ext_cmd->add_subcommand(
      "t", "Iteration rule: geometric fit through estimates at i=1,2");
  ext_t->add_option("--eps1", ext.eps1, "Estimate after one iteration")
      ->required();
  ext_t->add_option("--eps2", ext.eps2, "Estimate after two iterations")
      ->required();
  auto* opt_i = ext_t->add_option("--i", ext.i, "Predict at iteration i");
  auto* opt_target =
      ext_t->add_option("--target", ext.target,
                        "Report the first iteration at or below this error");
  opt_i->excludes(opt_target);
  ext_t->callback([&] {
    const GeometricModel fit = fit_geometric(ext.eps1, ext.eps2);
    if (ext.i > 0) {
      std::cout << format_g17(extrapolate_t(fit, ext.i)) << '\n';
    } else if (ext.target > 0.0) {
      std::cout << iterations_needed(fit, ext.target) << '\n';
    } else {
      throw CLI::ValidationError("extrapolate t", "pass --i or --target");
    }
  });

  // ---- experiment ---------------------------------------------------
  struct {
    std::string data;
    std::string grid;
    std::string m0_text;
    std::string m_text;
    std::string sketch = "gaussian";
    std::string norm = "l2";
    std::string out;
    int tmax = 3;
    int trials = 100;
    int B = 20;
    double alpha = 0.05;
    uint64_t seed = 0;
  } exp;
  auto* exp_cmd =
      app.add_subcommand("experiment", "Monte Carlo coverage experiment");
  exp_cmd->require_subcommand(1);
  auto add_experiment_common = [&](CLI::App* sub) {
    sub->add_option("--data", exp.data, "Problem file (.skls or LIBSVM)")
        ->required();
    sub->add_option("--sketch", exp.sketch,
                    "gaussian, rademacher, srht, or rowsample");
    sub->add_option("--trials", exp.trials, "Monte Carlo trials");
    sub->add_option("--B", exp.B, "Bootstrap replicates (default 20)");
    sub->add_option("--alpha", exp.alpha, "Quantile tail level (default 0.05)");
    sub->add_option("--norm", exp.norm, "l1, l2, linf, or lp:<p>");
    sub->add_option("--seed", exp.seed, "Master seed");
    sub->add_option("--out", exp.out, "CSV path ('-' or absent for stdout)");
  };
  auto* exp_cs = exp_cmd->add_subcommand("cs", "Sketch-size coverage sweep");
  add_experiment_common(exp_cs);
  exp_cs->add_option("--grid", exp.grid, "Sketch sizes, e.g. 5d:30d:5d")
      ->required();
  exp_cs->add_option("--m0", exp.m0_text, "Anchor size (defaults to grid start)");
  exp_cs->callback([&] {
    const LSProblem problem = load_data(exp.data);
    const std::vector<Index> grid = parse_grid(exp.grid, problem.d());
    const Index m0 = exp.m0_text.empty()
                         ? grid.front()
                         : parse_sketch_size(exp.m0_text, problem.d());
    const CoverageReport report = run_cs_experiment(
        problem, parse_sketch_kind(exp.sketch), grid, m0, exp.alpha, exp.B,
        exp.trials, parse_norm(exp.norm), exp.seed);
    emit(to_csv(report), exp.out);
  });
  auto* exp_ihs =
      exp_cmd->add_subcommand("ihs", "Per-iteration coverage sweep");
  add_experiment_common(exp_ihs);
  exp_ihs->add_option("--m", exp.m_text, "Sketch size (e.g. 600 or 50d)")
      ->required();
  exp_ihs->add_option("--tmax", exp.tmax, "Iterations (>= 3)");
  exp_ihs->callback([&] {
    const LSProblem problem = load_data(exp.data);
    const CoverageReport report = run_ihs_experiment(
        problem, parse_sketch_kind(exp.sketch),
        parse_sketch_size(exp.m_text, problem.d()), exp.tmax, exp.alpha,
        exp.B, exp.trials, parse_norm(exp.norm), exp.seed);
    emit(to_csv(report), exp.out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
