#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sketchls/bootstrap.hpp"
#include "sketchls/data_io.hpp"
#include "sketchls/harness.hpp"
#include "sketchls/linalg.hpp"
#include "sketchls/solvers.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

using namespace sketchls;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

struct TempDir {
  TempDir() {
    dir = fs::temp_directory_path() /
          ("sketchls_cli_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  fs::path file(const std::string& name) const { return dir / name; }
  fs::path dir;
  static int counter;
};

int TempDir::counter = 0;

// Runs the installed binary through the shell, capturing exit status and
// both output streams. Arguments must not need shell quoting.
RunResult run_cli(const std::string& args, const TempDir& tmp) {
  const fs::path out = tmp.file("stdout.txt");
  const fs::path err = tmp.file("stderr.txt");
  const std::string command = std::string(SKETCHLS_CLI_PATH) + " " + args +
                              " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(command.c_str());
  RunResult res;
  res.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  res.out = slurp(out);
  res.err = slurp(err);
  return res;
}

std::vector<double> parse_lines(const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    double v = 0.0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    REQUIRE(res.ec == std::errc());
    values.push_back(v);
  }
  return values;
}

// Every test works against one small generated problem on disk.
struct Fixture {
  Fixture() {
    const int status =
        run_cli("gen --n 80 --d 4 --cond well --tau 0.001 --seed 11 --out " +
                    data.string(),
                tmp)
            .status;
    REQUIRE(status == 0);
  }
  TempDir tmp;
  fs::path data = tmp.file("problem.skls");
};

}  // namespace

TEST_CASE("gen writes a loadable container and reports what it wrote") {
  TempDir tmp;
  const auto path = tmp.file("gen.skls");
  const auto res = run_cli(
      "gen --n 50 --d 3 --cond ill --tau 0 --seed 7 --out " + path.string(),
      tmp);
  CHECK(res.status == 0);
  CHECK(res.err.find("wrote") != std::string::npos);

  const LSProblem loaded = read_problem(path);
  CHECK(loaded.n() == 50);
  CHECK(loaded.d() == 3);
  const LSProblem expected =
      gen_synthetic({50, 3, Conditioning::Ill, 0.0, 7});
  CHECK((loaded.A() - expected.A()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.b() - expected.b()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("solve subcommands reproduce the library results exactly") {
  Fixture fx;
  const LSProblem problem = read_problem(fx.data);

  const auto exact = run_cli("solve exact --data " + fx.data.string(), fx.tmp);
  REQUIRE(exact.status == 0);
  const auto x_exact = parse_lines(exact.out);
  const Vector lib_exact = solve_exact_ls(problem);
  REQUIRE(static_cast<Index>(x_exact.size()) == problem.d());
  for (Index i = 0; i < problem.d(); ++i) CHECK(x_exact[i] == lib_exact[i]);

  const auto cs = run_cli(
      "solve cs --data " + fx.data.string() + " --m 20 --sketch srht --seed 3",
      fx.tmp);
  REQUIRE(cs.status == 0);
  const auto x_cs = parse_lines(cs.out);
  const auto lib_cs =
      classic_sketch(problem, make_sketch(SketchKind::SRHT, 20, 80, 3));
  for (Index i = 0; i < problem.d(); ++i) CHECK(x_cs[i] == lib_cs.x_tilde[i]);

  const auto ihs = run_cli("solve ihs --data " + fx.data.string() +
                               " --m 5d --t 3 --seed 9",
                           fx.tmp);
  REQUIRE(ihs.status == 0);
  const auto x_ihs = parse_lines(ihs.out);
  const auto lib_ihs = ihs_run(problem, SketchKind::GaussianIID, 20, 3, 9);
  for (Index i = 0; i < problem.d(); ++i) {
    CHECK(x_ihs[i] == lib_ihs.iterates.back()[i]);
  }

  // One refinement pass from zero and the one-shot Gram solve coincide.
  const auto hs = run_cli("solve hs --data " + fx.data.string() +
                              " --m 20 --seed " +
                              std::to_string(ihs_iteration_seed(4, 1)),
                          fx.tmp);
  const auto ihs1 = run_cli(
      "solve ihs --data " + fx.data.string() + " --m 20 --t 1 --seed 4",
      fx.tmp);
  REQUIRE(hs.status == 0);
  REQUIRE(ihs1.status == 0);
  CHECK(hs.out == ihs1.out);
}

TEST_CASE("estimate prints the documented epsilon and replicate count") {
  Fixture fx;
  const LSProblem problem = read_problem(fx.data);

  const auto res = run_cli("estimate cs --data " + fx.data.string() +
                               " --m 20 --B 10 --alpha 0.1 --seed 5",
                           fx.tmp);
  REQUIRE(res.status == 0);
  std::istringstream out(res.out);
  std::string key;
  double epsilon = 0.0;
  int replicates = 0;
  out >> key >> epsilon;
  CHECK(key == "epsilon");
  out >> key >> replicates;
  CHECK(key == "replicates");
  CHECK(replicates == 10);

  const auto cs =
      classic_sketch(problem, make_sketch(SketchKind::GaussianIID, 20, 80, 5));
  const auto lib = bootstrap_cs(cs.A_tilde, cs.b_tilde, cs.x_tilde, 10, 0.1,
                                NormSpec::l2(), rng::derive_seed(5, 9, 0));
  CHECK(epsilon == lib.epsilon);

  const auto ihs = run_cli("estimate ihs --data " + fx.data.string() +
                               " --m 20 --t 2 --B 8 --seed 6",
                           fx.tmp);
  REQUIRE(ihs.status == 0);
  CHECK(ihs.out.find("epsilon ") == 0);
  CHECK(ihs.out.find("replicates 8\n") != std::string::npos);
}

TEST_CASE("extrapolate evaluates the documented examples") {
  TempDir tmp;
  const auto rule_m =
      run_cli("extrapolate m --m0 50 --eps 0.8 --m 200", tmp);
  REQUIRE(rule_m.status == 0);
  CHECK(parse_lines(rule_m.out).at(0) == doctest::Approx(0.4));

  const auto rule_t =
      run_cli("extrapolate t --eps1 0.1 --eps2 0.05 --i 3", tmp);
  REQUIRE(rule_t.status == 0);
  CHECK(parse_lines(rule_t.out).at(0) == doctest::Approx(0.025));

  const auto horizon =
      run_cli("extrapolate t --eps1 0.1 --eps2 0.05 --target 0.025", tmp);
  REQUIRE(horizon.status == 0);
  CHECK(horizon.out == "3\n");

  CHECK(run_cli("extrapolate t --eps1 0.1 --eps2 0.05", tmp).status != 0);
  CHECK(run_cli("extrapolate t --eps1 0.1 --eps2 0.05 --i 2 --target 0.1",
                tmp)
            .status != 0);
  CHECK(run_cli("extrapolate m --m0 50 --eps 0.8 --m 25", tmp).status != 0);
}

TEST_CASE("experiment emits the library CSV to a file or stdout") {
  Fixture fx;
  const LSProblem problem = read_problem(fx.data);
  const auto csv_path = fx.tmp.file("report.csv");

  const auto to_file = run_cli(
      "experiment cs --data " + fx.data.string() +
          " --grid 3d:6d:3d --trials 3 --B 5 --alpha 0.1 --seed 13 --out " +
          csv_path.string(),
      fx.tmp);
  REQUIRE(to_file.status == 0);
  CHECK(to_file.out.empty());
  const auto expected = to_csv(run_cs_experiment(
      problem, SketchKind::GaussianIID, {12, 24}, 12, 0.1, 5, 3,
      NormSpec::l2(), 13));
  CHECK(slurp(csv_path) == expected);

  const auto to_stdout = run_cli(
      "experiment ihs --data " + fx.data.string() +
          " --m 20 --tmax 3 --trials 2 --B 4 --alpha 0.1 --seed 14",
      fx.tmp);
  REQUIRE(to_stdout.status == 0);
  const auto expected_ihs = to_csv(run_ihs_experiment(
      problem, SketchKind::GaussianIID, 20, 3, 0.1, 4, 2, NormSpec::l2(),
      14));
  CHECK(to_stdout.out == expected_ihs);
}

TEST_CASE("failures exit nonzero with a diagnostic") {
  TempDir tmp;
  CHECK(run_cli("solve exact", tmp).status != 0);  // missing --data
  CHECK(run_cli("definitely-not-a-command", tmp).status != 0);

  const auto missing =
      run_cli("solve exact --data /nonexistent/problem.skls", tmp);
  CHECK(missing.status == 1);
  CHECK(missing.err.find("error:") != std::string::npos);

  // A sketch size below the problem width cannot be solved.
  const auto path = tmp.file("tiny.skls");
  REQUIRE(run_cli("gen --n 30 --d 5 --out " + path.string(), tmp).status ==
          0);
  const auto too_small =
      run_cli("solve cs --data " + path.string() + " --m 4", tmp);
  CHECK(too_small.status == 1);
  CHECK(too_small.err.find("error:") != std::string::npos);
}
