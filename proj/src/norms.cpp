#include "sketchls/norms.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace sketchls {

NormSpec NormSpec::lp(double p) {
  if (!(p >= 1.0)) {
    throw std::invalid_argument("NormSpec::lp: p must be >= 1, got " +
                                std::to_string(p));
  }
  return {NormKind::Lp, p, nullptr, "lp:" + std::to_string(p)};
}

NormSpec NormSpec::custom(Evaluator evaluator, std::string name) {
  if (!evaluator) {
    throw std::invalid_argument("NormSpec::custom: evaluator must be callable");
  }
  return {NormKind::Custom, 0.0, std::move(evaluator), std::move(name)};
}

namespace {

double lp_eval(const Vector& v, double p) {
  if (v.size() == 0) return 0.0;
  // Scale by the largest magnitude so |v_i|^p cannot overflow.
  const double top = v.cwiseAbs().maxCoeff();
  if (top == 0.0) return 0.0;
  double acc = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    acc += std::pow(std::abs(v[i]) / top, p);
  }
  return top * std::pow(acc, 1.0 / p);
}

}  // namespace

double norm_eval(const NormSpec& spec, const Vector& v) {
  if (!v.allFinite()) {
    throw std::invalid_argument("norm_eval: vector has non-finite entries");
  }
  switch (spec.kind_) {
    case NormKind::L1:
      return v.lpNorm<1>();
    case NormKind::L2:
      return v.lpNorm<2>();
    case NormKind::LInf:
      return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
    case NormKind::Lp:
      return lp_eval(v, spec.p_);
    case NormKind::Custom: {
      const double value = spec.evaluator_(v);
      if (!std::isfinite(value) || value < 0.0) {
        throw std::invalid_argument(
            "norm_eval: custom evaluator returned an invalid norm value");
      }
      return value;
    }
  }
  throw std::logic_error("norm_eval: unknown norm kind");
}

NormSpec parse_norm(std::string_view text) {
  if (text == "l1") return NormSpec::l1();
  if (text == "l2") return NormSpec::l2();
  if (text == "linf") return NormSpec::linf();
  if (text.rfind("lp:", 0) == 0) {
    const std::string_view num = text.substr(3);
    double p = 0.0;
    const auto [ptr, ec] = std::from_chars(num.begin(), num.end(), p);
    if (ec != std::errc{} || ptr != num.end()) {
      throw std::invalid_argument("parse_norm: bad exponent in '" +
                                  std::string(text) + "'");
    }
    return NormSpec::lp(p);
  }
  throw std::invalid_argument("parse_norm: unknown norm '" +
                              std::string(text) +
                              "' (expected l1, l2, linf, or lp:<p>)");
}

}  // namespace sketchls
