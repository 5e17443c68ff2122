#pragma once

#include <optional>
#include <string>
#include <vector>

#include "livsic/lyapunov.hpp"

namespace livsic {

struct DominationGrid {
  int base_resolution = 0;  // 0: the base's default grid
  int fiber_samples = 256;
  long periodic_up_to = 0;  // also test all periodic fiber cycles up to this period
  std::uint64_t seed = 1;
};

struct DominationReport {
  double beta = 1;
  std::optional<long> ell;
  std::optional<long> ell_u;
  std::optional<long> ell_s;
  double margin = 0;  // worst ratio against the bound at ell (best l if none)
  std::string side;   // both | u | s | none
  std::string grid_spec;
  std::size_t states = 0;
  // Per l = 1..ell_max: sup and inf of log |d_fib F^l| over the states.
  std::vector<double> max_log_derivative;
  std::vector<double> min_log_derivative;
};

/// Smallest l <= ell_max with
///   |d_fib F^l| <= (nu_u^(l))^beta / 2  and  |(d_fib F^l)^-1|^-1 >= 2 (nu_s^(l))^beta
/// on every test state.
DominationReport domination_test(const SkewSystem& s, double beta, long ell_max, const DominationGrid& grid = {},
                                 const Exec& exec = default_exec());

struct ContractingPoint {
  BasePoint p;
  long n = 0;
  std::vector<double> fiber_cycle;
  double multiplier = 1;
};

struct FinderOptions {
  long max_period = 12;
  int fiber_samples = 256;
  double contraction_tol = 1e-6;  // |multiplier| < 1 - tol counts as contracting
};

struct FinderReport {
  std::optional<ContractingPoint> found;
  long steps = 0;
  long near_returns = 0;
  long closings = 0;  // distinct periodic points examined
};

/// Iterates the base from the seed, closes every near return with
/// d(x, f^n x) < delta1 (n <= max_period) and inspects the fiber cycles over
/// the closing point. Returns the first cycle with |multiplier| < 1.
FinderReport find_contracting_periodic(const SkewSystem& s, const SkewState& seed, long N,
                                       const FinderOptions& options = {});

}  // namespace livsic
