#pragma once

#include <vector>

#include "livsic/base.hpp"

namespace livsic {

/// amp * cos(2 pi (kx u + ky v) + phase) on the torus.
struct TrigTerm {
  double amp = 0;
  int kx = 0;
  int ky = 0;
  double phase = 0;
  bool operator==(const TrigTerm&) const = default;
};

/// weight * x_coord on the shift (the symbol read as a number).
struct SymbolTerm {
  long coord = 0;
  double weight = 0;
  bool operator==(const SymbolTerm&) const = default;
};

/// Real function on a base: constant plus trigonometric terms (torus) or
/// symbol terms (shift). Terms of the other kind are ignored, so one
/// description can be reused across bases.
struct BaseFunction {
  double constant = 0;
  std::vector<TrigTerm> trig;
  std::vector<SymbolTerm> symbols;

  static BaseFunction constant_value(double c) { return {c, {}, {}}; }

  double operator()(const BasePoint& x) const;
  bool is_constant() const { return trig.empty() && symbols.empty(); }
  /// Analytic Lipschitz bound for the base metric: sum of |amp| 2 pi |k| on
  /// the torus; sum of |w| (k - 1) theta^-(|coord| - 1)_+ on the shift.
  double lipschitz_bound(const HyperbolicBase& base) const;
  /// Largest |coord| used by symbol terms.
  long symbol_radius() const;

  bool operator==(const BaseFunction&) const = default;
};

}  // namespace livsic
