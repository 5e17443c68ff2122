#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "livsic/cocycle.hpp"

namespace livsic {

struct LyapunovEstimate {
  double lambda_plus = 0;
  double lambda_minus = 0;
  long orbit_length = 0;
  BasePoint start_x;
  double start_y = 0;
  // (iterate, running lambda_plus) at checkpoints.
  std::vector<std::pair<long, double>> convergence_trace;
};

/// Birkhoff estimate along N forward steps, accumulated in log space.
/// Circle fibers start at (state.x, state.y); linear fibers use a QR frame
/// started at the identity and report the largest and smallest exponents.
LyapunovEstimate lyapunov_forward(const SkewSystem& s, const SkewState& state, long N, int checkpoints = 10);
/// The same for F^-1 (N backward steps from state).
LyapunovEstimate lyapunov_backward(const SkewSystem& s, const SkewState& state, long N, int checkpoints = 10);

struct FiberCycle {
  std::vector<double> points;  // the fiber orbit over p (size = fiber period)
  double multiplier = 1;       // derivative of Phi^(n q)(p) along the cycle
};

struct PeriodicFiberReport {
  BasePoint p;
  long n = 0;
  std::vector<FiberCycle> cycles;
  /// Displacement of the fiber map is an integer everywhere within
  /// tolerance: there are no isolated periodic fiber points.
  bool degenerate = false;
  // Range of the fiber derivative over the sample grid.
  double min_derivative = 1;
  double max_derivative = 1;
};

/// Periodic points of the circle map Phi^(n)(p) with fiber period up to
/// max_fiber_period, found from sign changes of the displacement on the
/// sample grid and refined by bisection.
PeriodicFiberReport lyapunov_periodic(const SkewSystem& s, const BasePoint& p, long n, int max_fiber_period = 1,
                                      int samples = CircleDiffeo::default_grid, double degenerate_tol = 1e-9);

/// Moduli of the eigenvalues of A^(n)(p), descending.
std::vector<double> linear_periodic_moduli(const SkewSystem& s, const BasePoint& p, long n);

struct SweepRow {
  long orbit_id = 0;
  long period = 0;  // 0 for generic orbits
  std::string type;  // periodic | generic
  double lambda_plus = 0;
  double lambda_minus = 0;
  long length = 0;
  double multiplier = 0;  // periodic rows; NaN when not applicable
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double envelope_min = 0;
  double envelope_max = 0;
};

/// Exponents over all periodic orbits of period <= P (exact multipliers) and
/// random_orbits Birkhoff runs of length N.
SweepResult exponent_sweep(const SkewSystem& s, long P, std::size_t random_orbits, long N, std::uint64_t seed,
                           const Exec& exec = default_exec());

}  // namespace livsic
