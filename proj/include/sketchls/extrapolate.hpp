#pragma once

#include "sketchls/types.hpp"

#include <variant>

namespace sketchls {

// Anchor for sketch-size extrapolation: an error estimate eps_init obtained
// at sketch size m0 predicts sqrt(m0 / m) * eps_init at any m >= m0.
struct SketchSizeModel {
  Index m0 = 0;
  double eps_init = 0.0;  // nonnegative
};

// Two-point geometric error model c * eta^i for iteration extrapolation.
struct GeometricModel {
  double c_hat = 0.0;
  double eta_hat = 0.0;
};

using ExtrapolationModel = std::variant<SketchSizeModel, GeometricModel>;

// Prediction at sketch size m; requires m >= m0 (the rule runs forward only).
double extrapolate_m(const SketchSizeModel& model, Index m);

// Fits c, eta from error estimates at iterations 1 and 2:
// eta = eps2 / eps1, c = eps1 / eta. Both estimates must be positive.
GeometricModel fit_geometric(double eps1, double eps2);

// Prediction c * eta^i at 1-based iteration i. Reproduces the anchors at
// i = 1, 2 up to floating-point rounding.
double extrapolate_t(const GeometricModel& model, int i);

// Smallest i with c * eta^i <= target, found by direct iteration. Throws
// std::domain_error when eta >= 1 and the target lies below the first
// prediction (no finite horizon).
int iterations_needed(const GeometricModel& model, double target);

}  // namespace sketchls
