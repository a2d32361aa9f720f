#include "sketchls/solvers.hpp"

#include "sketchls/linalg.hpp"
#include "sketchls/rng.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace sketchls {

namespace {

constexpr uint64_t kTagIteration = 4;

void check_operator_shape(const LSProblem& problem, const SketchOperator& op,
                          const char* where) {
  if (op.n != problem.n()) {
    throw std::invalid_argument(
        std::string(where) + ": operator expects " + std::to_string(op.n) +
        " rows, problem has " + std::to_string(problem.n()));
  }
  if (op.m <= problem.d()) {
    throw std::invalid_argument(std::string(where) + ": sketch size m=" +
                                std::to_string(op.m) + " must exceed d=" +
                                std::to_string(problem.d()));
  }
}

// One refinement step against a freshly sketched Gram matrix:
//   x + argmin_u (1/2)||SA u||^2 + <gradient, u>
// where gradient = A'(Ax - b). The one-shot Gram solver and the iterative
// run both funnel through this function, so a single iteration from zero
// and the one-shot solve agree bit for bit.
Vector gram_step(const Matrix& A_sketched, const Vector& x,
                 const Vector& gradient, const std::string& context) {
  SketchedGram gram(A_sketched);
  if (gram.rank_deficient()) {
    throw RankError(context + ": sketched matrix lost column rank");
  }
  return x + gram.solve(-gradient);
}

}  // namespace

CSResult classic_sketch(const LSProblem& problem, const SketchOperator& op) {
  check_operator_shape(problem, op, "classic_sketch");
  Matrix A_tilde = apply_sketch(op, problem.A());
  Vector b_tilde = apply_sketch(op, problem.b());
  auto out = detail::lstsq_qr(A_tilde, b_tilde);
  if (out.rank_deficient) {
    throw RankError(
        "classic_sketch: sketched matrix lost column rank (sketch seed " +
        std::to_string(op.seed) + ")");
  }
  return CSResult{std::move(out.x), std::move(A_tilde), std::move(b_tilde)};
}

Vector hessian_sketch(const LSProblem& problem, const SketchOperator& op) {
  check_operator_shape(problem, op, "hessian_sketch");
  Matrix A_sketched = apply_sketch(op, problem.A());
  const Vector x0 = Vector::Zero(problem.d());
  const Vector gradient = problem.AtA() * x0 - problem.Atb();
  return gram_step(A_sketched, x0, gradient,
                   "hessian_sketch (sketch seed " + std::to_string(op.seed) +
                       ")");
}

uint64_t ihs_iteration_seed(uint64_t seed, int iteration) {
  if (iteration < 1) {
    throw std::invalid_argument("ihs_iteration_seed: iteration is 1-based");
  }
  return rng::derive_seed(seed, kTagIteration,
                          static_cast<uint64_t>(iteration));
}

IHSTrace ihs_run(const LSProblem& problem,
                 std::span<const SketchOperator> ops, const Vector& x0) {
  if (ops.empty()) {
    throw std::invalid_argument("ihs_run: need at least one operator");
  }
  if (x0.size() != problem.d()) {
    throw std::invalid_argument("ihs_run: x0 has " +
                                std::to_string(x0.size()) +
                                " entries, expected d=" +
                                std::to_string(problem.d()));
  }
  IHSTrace trace;
  trace.t = static_cast<int>(ops.size());
  trace.iterates.reserve(ops.size() + 1);
  trace.iterates.push_back(x0);
  Vector x = x0;
  for (size_t i = 0; i < ops.size(); ++i) {
    const SketchOperator& op = ops[i];
    check_operator_shape(problem, op, "ihs_run");
    Matrix A_sketched = apply_sketch(op, problem.A());
    Vector gradient = problem.AtA() * x - problem.Atb();
    Vector next = gram_step(A_sketched, x, gradient,
                            "ihs_run: iteration " + std::to_string(i + 1) +
                                " (sketch seed " + std::to_string(op.seed) +
                                ")");
    trace.iterates.push_back(next);
    x = std::move(next);
    if (i + 1 == ops.size()) {
      trace.A_tilde_t = std::move(A_sketched);
      trace.g_prev = std::move(gradient);
    }
  }
  return trace;
}

IHSTrace ihs_run(const LSProblem& problem, SketchKind kind, Index m, int t,
                 const Vector& x0, uint64_t seed) {
  if (t < 1) {
    throw std::invalid_argument("ihs_run: need t >= 1, got " +
                                std::to_string(t));
  }
  std::vector<SketchOperator> ops;
  ops.reserve(static_cast<size_t>(t));
  for (int i = 1; i <= t; ++i) {
    ops.push_back(
        make_sketch(kind, m, problem.n(), ihs_iteration_seed(seed, i)));
  }
  return ihs_run(problem, ops, x0);
}

IHSTrace ihs_run(const LSProblem& problem, SketchKind kind, Index m, int t,
                 uint64_t seed) {
  return ihs_run(problem, kind, m, t, Vector::Zero(problem.d()), seed);
}

}  // namespace sketchls
