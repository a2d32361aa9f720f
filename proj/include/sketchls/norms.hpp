#pragma once

#include "sketchls/types.hpp"

#include <functional>
#include <string>
#include <string_view>

namespace sketchls {

enum class NormKind { L1, L2, LInf, Lp, Custom };

// Selects the vector norm used to measure solution error. Built-in kinds
// evaluate through dedicated code paths; Lp covers any p >= 1; Custom wraps
// a caller-supplied evaluator, which must itself be a norm.
class NormSpec {
 public:
  using Evaluator = std::function<double(const Vector&)>;

  NormSpec() : NormSpec(NormKind::L2, 2.0, nullptr, "l2") {}

  static NormSpec l1() { return {NormKind::L1, 1.0, nullptr, "l1"}; }
  static NormSpec l2() { return {NormKind::L2, 2.0, nullptr, "l2"}; }
  static NormSpec linf() { return {NormKind::LInf, 0.0, nullptr, "linf"}; }
  static NormSpec lp(double p);  // requires p >= 1
  static NormSpec custom(Evaluator evaluator, std::string name = "custom");

  NormKind kind() const { return kind_; }
  double p() const { return p_; }
  const std::string& name() const { return name_; }

  friend double norm_eval(const NormSpec& spec, const Vector& v);

 private:
  NormSpec(NormKind kind, double p, Evaluator evaluator, std::string name)
      : kind_(kind), p_(p), evaluator_(std::move(evaluator)),
        name_(std::move(name)) {}

  NormKind kind_;
  double p_;
  Evaluator evaluator_;
  std::string name_;
};

// Evaluates the norm. Rejects non-finite input; a Custom evaluator must
// return a finite nonnegative value or evaluation fails.
double norm_eval(const NormSpec& spec, const Vector& v);

// Parses "l1", "l2", "linf", or "lp:<p>" (e.g. "lp:2.5").
NormSpec parse_norm(std::string_view text);

}  // namespace sketchls
