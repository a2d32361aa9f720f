#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sketchls/linalg.hpp"
#include "sketchls/solvers.hpp"

#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

using namespace sketchls;

namespace {

const std::vector<SketchKind> kAllKinds = {
    SketchKind::GaussianIID, SketchKind::RademacherIID, SketchKind::SRHT,
    SketchKind::UniformRowSample};

// Four-row problem whose design holds the first two coordinate axes, so
// A'b vanishes whenever b lives in the remaining coordinates.
LSProblem axis_problem(const Vector& b) {
  Matrix A = Matrix::Zero(4, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 1.0;
  return LSProblem(A, b);
}

}  // namespace

TEST_CASE("identity embedding reproduces the exact solver bit for bit") {
  const auto problem = testutil::random_problem(20, 4, 11);
  const auto res = classic_sketch(problem, testutil::identity_embedding(20));
  const Vector exact = solve_exact_ls(problem);
  CHECK((res.x_tilde - exact).cwiseAbs().maxCoeff() == 0.0);
  CHECK((res.A_tilde - problem.A()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((res.b_tilde - problem.b()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identity embedding makes one Gram iteration exact") {
  const auto problem = testutil::random_problem(24, 5, 12);
  const Vector exact =
      testutil::normal_equations_solve(problem.A(), problem.b());
  const Vector hs = hessian_sketch(problem, testutil::identity_embedding(24));
  CHECK(testutil::rel_err(hs, exact) <= 1e-10);
}

TEST_CASE("sketch-and-solve recovers consistent systems") {
  const Matrix A = testutil::random_matrix(48, 5, 13);
  const Vector x_star = testutil::random_vector(5, 14);
  const auto problem = LSProblem(A, A * x_star);
  for (const SketchKind kind : kAllKinds) {
    CAPTURE(sketch_kind_name(kind));
    const auto op = make_sketch(kind, 16, 48, 15);
    const auto res = classic_sketch(problem, op);
    CHECK(testutil::rel_err(res.x_tilde, x_star) <= 1e-8);
  }
}

TEST_CASE("sketched solution satisfies the sketched normal equations") {
  const auto problem = testutil::random_problem(64, 6, 16);
  for (const SketchKind kind : kAllKinds) {
    CAPTURE(sketch_kind_name(kind));
    const auto res =
        classic_sketch(problem, make_sketch(kind, 24, 64, 17));
    const Vector grad =
        res.A_tilde.transpose() * (res.A_tilde * res.x_tilde - res.b_tilde);
    const double scale =
        std::max(1.0, (res.A_tilde.transpose() * res.b_tilde).norm());
    CHECK(grad.norm() <= 1e-8 * scale);
  }
}

TEST_CASE("Gram solver returns exactly zero when the gradient vanishes") {
  Vector b = Vector::Zero(4);
  b[2] = 3.0;  // orthogonal to both columns
  const auto problem = axis_problem(b);
  const Vector hs =
      hessian_sketch(problem, make_sketch(SketchKind::GaussianIID, 3, 4, 18));
  CHECK(hs.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Gram solve and first refinement step share their arithmetic") {
  const auto problem = testutil::random_problem(40, 4, 19);
  for (const SketchKind kind : kAllKinds) {
    for (const uint64_t seed : {0ull, 7ull, 123456789ull}) {
      CAPTURE(sketch_kind_name(kind));
      CAPTURE(seed);
      const auto op =
          make_sketch(kind, 12, 40, ihs_iteration_seed(seed, 1));
      const Vector hs = hessian_sketch(problem, op);
      const auto trace = ihs_run(problem, kind, 12, 1, seed);
      REQUIRE(trace.iterates.size() == 2);
      CHECK((trace.iterates[1] - hs).cwiseAbs().maxCoeff() == 0.0);
      CHECK(trace.iterates[0].cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("the exact solution is a fixed point of the refinement") {
  const auto problem = testutil::random_problem(60, 5, 20);
  const Vector exact = solve_exact_ls(problem);
  const auto trace =
      ihs_run(problem, SketchKind::GaussianIID, 20, 3, exact, 21);
  for (const Vector& x : trace.iterates) {
    CHECK(testutil::rel_err(x, exact) <= 1e-8);
  }
}

TEST_CASE("sketch-and-solve error shrinks as the sketch grows") {
  const auto problem = testutil::random_problem(512, 8, 22);
  const Vector exact = solve_exact_ls(problem);
  auto median_err = [&](Index m) {
    std::vector<double> errs;
    for (uint64_t s = 0; s < 15; ++s) {
      const auto res =
          classic_sketch(problem, make_sketch(SketchKind::GaussianIID,
                                              m, 512, 100 + s));
      errs.push_back((res.x_tilde - exact).norm());
    }
    std::nth_element(errs.begin(), errs.begin() + 7, errs.end());
    return errs[7];
  };
  CHECK(median_err(160) < median_err(40));
}

TEST_CASE("refinement contracts the error at practical sketch sizes") {
  const auto problem = testutil::random_problem(1024, 10, 23);
  const Vector exact = solve_exact_ls(problem);
  int monotone = 0;
  const int seeds = 20;
  for (uint64_t s = 0; s < static_cast<uint64_t>(seeds); ++s) {
    const auto trace =
        ihs_run(problem, SketchKind::GaussianIID, 500, 4, 200 + s);
    bool decreasing = true;
    double prev = (trace.iterates[0] - exact).norm();
    for (size_t i = 1; i < trace.iterates.size(); ++i) {
      const double cur = (trace.iterates[i] - exact).norm();
      decreasing = decreasing && cur < prev;
      prev = cur;
    }
    monotone += decreasing ? 1 : 0;
  }
  CHECK(monotone >= seeds - 1);
}

TEST_CASE("runs are deterministic in the seed") {
  const auto problem = testutil::random_problem(32, 3, 24);
  const auto t1 = ihs_run(problem, SketchKind::SRHT, 10, 3, 25);
  const auto t2 = ihs_run(problem, SketchKind::SRHT, 10, 3, 25);
  REQUIRE(t1.iterates.size() == t2.iterates.size());
  for (size_t i = 0; i < t1.iterates.size(); ++i) {
    CHECK((t1.iterates[i] - t2.iterates[i]).cwiseAbs().maxCoeff() == 0.0);
  }
  const auto t3 = ihs_run(problem, SketchKind::SRHT, 10, 3, 26);
  CHECK((t3.iterates.back() - t1.iterates.back()).cwiseAbs().maxCoeff() !=
        0.0);
}

TEST_CASE("iteration seeds are distinct and reproducible") {
  CHECK(ihs_iteration_seed(7, 1) == ihs_iteration_seed(7, 1));
  CHECK(ihs_iteration_seed(7, 1) != ihs_iteration_seed(7, 2));
  CHECK(ihs_iteration_seed(7, 1) != ihs_iteration_seed(8, 1));
}

TEST_CASE("stored gradient matches its defining expression") {
  const auto problem = testutil::random_problem(48, 4, 27);
  const auto trace = ihs_run(problem, SketchKind::RademacherIID, 16, 3, 28);
  const Vector g = problem.AtA() * trace.iterates[trace.iterates.size() - 2] -
                   problem.Atb();
  const double scale = std::max(1.0, g.norm());
  CHECK((trace.g_prev - g).cwiseAbs().maxCoeff() <= 1e-13 * scale);
  const Matrix expected_sketch = apply_sketch(
      make_sketch(SketchKind::RademacherIID, 16, 48,
                  ihs_iteration_seed(28, 3)),
      problem.A());
  CHECK((trace.A_tilde_t - expected_sketch).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("prefix runs over shared operators reproduce the trajectory") {
  const auto problem = testutil::random_problem(40, 4, 29);
  std::vector<SketchOperator> ops;
  for (int i = 1; i <= 3; ++i) {
    ops.push_back(make_sketch(SketchKind::GaussianIID, 14, 40,
                              ihs_iteration_seed(30, i)));
  }
  const Vector x0 = Vector::Zero(4);
  const auto full = ihs_run(problem, ops, x0);
  const auto prefix =
      ihs_run(problem, std::span<const SketchOperator>(ops.data(), 2), x0);
  REQUIRE(prefix.iterates.size() == 3);
  for (size_t i = 0; i < prefix.iterates.size(); ++i) {
    CHECK((prefix.iterates[i] - full.iterates[i]).cwiseAbs().maxCoeff() ==
          0.0);
  }
  // The seeded overload walks the same schedule.
  const auto seeded = ihs_run(problem, SketchKind::GaussianIID, 14, 3, 31);
  std::vector<SketchOperator> seeded_ops;
  for (int i = 1; i <= 3; ++i) {
    seeded_ops.push_back(make_sketch(SketchKind::GaussianIID, 14, 40,
                                     ihs_iteration_seed(31, i)));
  }
  const auto replay = ihs_run(problem, seeded_ops, Vector::Zero(4));
  CHECK((seeded.iterates.back() - replay.iterates.back())
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("shape preconditions are rejected") {
  const auto problem = testutil::random_problem(20, 4, 32);
  CHECK_THROWS_AS(
      classic_sketch(problem, make_sketch(SketchKind::GaussianIID, 8, 19, 1)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      classic_sketch(problem, make_sketch(SketchKind::GaussianIID, 4, 20, 1)),
      std::invalid_argument);
  CHECK_THROWS_AS(hessian_sketch(
                      problem, make_sketch(SketchKind::GaussianIID, 3, 20, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(ihs_run(problem, SketchKind::GaussianIID, 10, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      ihs_run(problem, SketchKind::GaussianIID, 10, 2, Vector::Zero(3), 1),
      std::invalid_argument);
}

TEST_CASE("rank collapse raises a descriptive error") {
  // Both design columns vanish on the sampled rows, so the sketch is zero.
  Vector b(4);
  b << 1.0, 2.0, 3.0, 4.0;
  const auto problem = axis_problem(b);
  const auto degenerate = testutil::row_sample_with_indices(4, {2, 3, 3});

  CHECK_THROWS_WITH_AS(classic_sketch(problem, degenerate),
                       doctest::Contains("seed"), RankError);
  CHECK_THROWS_WITH_AS(hessian_sketch(problem, degenerate),
                       doctest::Contains("seed"), RankError);

  const std::vector<SketchOperator> ops = {degenerate};
  CHECK_THROWS_WITH_AS(ihs_run(problem, ops, Vector::Zero(2)),
                       doctest::Contains("iteration 1"), RankError);
}
