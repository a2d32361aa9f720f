#pragma once

#include "sketchls/sketch.hpp"
#include "sketchls/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sketchls {

// One-shot sketch-and-solve: x = argmin ||S(Ax - b)||_2, together with the
// sketched data (SA, Sb) that the bootstrap error estimator consumes.
struct CSResult {
  Vector x_tilde;
  Matrix A_tilde;
  Vector b_tilde;
};

// Trace of an iterative Hessian-sketch run. Keeps every iterate x_0 .. x_t
// plus the final sketch S_t A and the gradient at x_{t-1}, which together
// are exactly the inputs the bootstrap error estimator needs.
struct IHSTrace {
  std::vector<Vector> iterates;  // size t + 1; iterates[i] is x_i
  Matrix A_tilde_t;              // S_t A
  Vector g_prev;                 // A'(A x_{t-1} - b)
  int t = 0;
};

// Requires op.n == problem.n() and op.m > problem.d(). Throws RankError
// (naming the sketch seed) if the sketched matrix loses column rank.
CSResult classic_sketch(const LSProblem& problem, const SketchOperator& op);

// Solves argmin_x (1/2)||S A x||_2^2 - <A'b, x>, i.e. the normal equations
// with the sketched Gram matrix and the exact right-hand side. Equivalent to
// a single Hessian-sketch iteration started from zero, and computed through
// the identical arithmetic so the two agree bit for bit.
Vector hessian_sketch(const LSProblem& problem, const SketchOperator& op);

// Seed of the sketch drawn at 1-based iteration i of a run seeded with seed.
uint64_t ihs_iteration_seed(uint64_t seed, int iteration);

// Iterative Hessian sketch: t iterations, each drawing a fresh operator from
// ihs_iteration_seed(seed, i) and refining
//   x_i = x_{i-1} + argmin_u (1/2)||S_i A u||^2 + <A'(A x_{i-1} - b), u>.
IHSTrace ihs_run(const LSProblem& problem, SketchKind kind, Index m, int t,
                 const Vector& x0, uint64_t seed);
IHSTrace ihs_run(const LSProblem& problem, SketchKind kind, Index m, int t,
                 uint64_t seed);  // x0 = 0

// Same iteration with caller-supplied operators; ops[i] is used at iteration
// i + 1. Lets tests inject exact operators and lets drivers share operators
// across prefix runs.
IHSTrace ihs_run(const LSProblem& problem, std::span<const SketchOperator> ops,
                 const Vector& x0);

}  // namespace sketchls
