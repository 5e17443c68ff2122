#include "livsic/base_function.hpp"

#include <cmath>
#include <numbers>

namespace livsic {

double BaseFunction::operator()(const BasePoint& x) const {
  double s = constant;
  if (const auto* t = std::get_if<TorusPoint>(&x)) {
    for (const auto& term : trig)
      s += term.amp * std::cos(2 * std::numbers::pi * (term.kx * t->u + term.ky * t->v) + term.phase);
  } else {
    const auto& p = std::get<SftPoint>(x);
    for (const auto& term : symbols) s += term.weight * p.at(term.coord);
  }
  return s;
}

double BaseFunction::lipschitz_bound(const HyperbolicBase& base) const {
  double s = 0;
  if (base.kind() == BaseKind::cat_map) {
    for (const auto& term : trig) s += std::abs(term.amp) * 2 * std::numbers::pi * std::hypot(term.kx, term.ky);
  } else {
    const double theta = base.sft().theta();
    const double span = base.sft().alphabet() - 1;
    for (const auto& term : symbols)
      s += std::abs(term.weight) * span * std::pow(theta, -static_cast<double>(std::max(0L, std::abs(term.coord) - 1)));
  }
  return s;
}

long BaseFunction::symbol_radius() const {
  long r = 0;
  for (const auto& term : symbols) r = std::max(r, std::abs(term.coord));
  return r;
}

}  // namespace livsic
