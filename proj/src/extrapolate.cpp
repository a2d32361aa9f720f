#include "sketchls/extrapolate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sketchls {

namespace {

void check_model(const GeometricModel& model, const char* where) {
  if (!(model.c_hat > 0.0) || !(model.eta_hat > 0.0) ||
      !std::isfinite(model.c_hat) || !std::isfinite(model.eta_hat)) {
    throw std::invalid_argument(std::string(where) +
                                ": model needs finite positive c and eta");
  }
}

}  // namespace

double extrapolate_m(const SketchSizeModel& model, Index m) {
  if (model.m0 < 1) {
    throw std::invalid_argument("extrapolate_m: need m0 >= 1, got " +
                                std::to_string(model.m0));
  }
  if (!(model.eps_init >= 0.0) || !std::isfinite(model.eps_init)) {
    throw std::invalid_argument(
        "extrapolate_m: eps_init must be finite and nonnegative");
  }
  if (m < model.m0) {
    throw std::invalid_argument(
        "extrapolate_m: the rule runs forward only (m >= m0), got m=" +
        std::to_string(m) + ", m0=" + std::to_string(model.m0));
  }
  return std::sqrt(static_cast<double>(model.m0) / static_cast<double>(m)) *
         model.eps_init;
}

GeometricModel fit_geometric(double eps1, double eps2) {
  if (!(eps1 > 0.0) || !(eps2 > 0.0) || !std::isfinite(eps1) ||
      !std::isfinite(eps2)) {
    throw std::invalid_argument(
        "fit_geometric: both estimates must be finite and positive");
  }
  const double eta = eps2 / eps1;
  return GeometricModel{eps1 / eta, eta};
}

double extrapolate_t(const GeometricModel& model, int i) {
  check_model(model, "extrapolate_t");
  if (i < 1) {
    throw std::invalid_argument("extrapolate_t: iteration index is 1-based");
  }
  return model.c_hat * std::pow(model.eta_hat, static_cast<double>(i));
}

int iterations_needed(const GeometricModel& model, double target) {
  check_model(model, "iterations_needed");
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw std::invalid_argument(
        "iterations_needed: target must be finite and positive");
  }
  // Walk the recurrence directly; a closed-form log ratio can land on the
  // wrong side of the boundary when the target sits on a prediction.
  double value = model.c_hat * model.eta_hat;
  int i = 1;
  while (value > target) {
    if (model.eta_hat >= 1.0) {
      throw std::domain_error(
          "iterations_needed: no finite horizon (eta >= 1 and the target "
          "lies below the first prediction)");
    }
    if (i == std::numeric_limits<int>::max()) {
      throw std::overflow_error(
          "iterations_needed: horizon exceeds the integer range");
    }
    value *= model.eta_hat;
    ++i;
  }
  return i;
}

}  // namespace sketchls
