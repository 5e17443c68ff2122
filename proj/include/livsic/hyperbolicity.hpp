#pragma once

namespace livsic {

/// Constants of a hyperbolic homeomorphism with local product structure.
/// Both concrete bases have constant rate cocycles, so nu_s and nu_u are
/// scalars and the n-step rates are plain powers.
struct HyperbolicityData {
  double eps0 = 0;
  double delta0 = 0;
  double K0 = 1;
  double lambda = 0;
  double nu_s = 0;
  double nu_u = 0;
  // Closing-lemma constants: shadowing constant c and admissible return
  // distance delta1 = delta0 / (2c).
  double closing_c = 0;
  double delta1 = 0;

  double nu_s_power(long n) const;
  double nu_u_power(long n) const;

  /// Constants of the same map for the metric d^alpha. Rates become
  /// nu^alpha and lengths become length^alpha.
  HyperbolicityData with_metric_exponent(double alpha) const;

  bool operator==(const HyperbolicityData&) const = default;
};

}  // namespace livsic
