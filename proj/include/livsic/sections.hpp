#pragma once

#include <optional>
#include <string>
#include <vector>

#include "livsic/domination.hpp"
#include "livsic/solver.hpp"

namespace livsic {

enum class LeafSide { s, u };

struct LiftResult {
  double value = 0;   // fiber lift over z
  long depth = 0;     // iterates used
  double change = 0;  // last successive-depth difference
  bool converged = false;
};

struct LiftOptions {
  long max_depth = 200;
  double tolerance = 1e-8;
};

/// Fiber point over z on the lifted stable (unstable) set of zeta:
/// (Phi^(d)(z))^-1 Phi^(d)(x)(y) for growing d (negative d on the u side).
/// Throws a precondition error when z leaves the local stable (unstable)
/// set of x within the iterates used.
LiftResult lift(const SkewSystem& s, const SkewState& zeta, const BasePoint& z, LeafSide side,
                const LiftOptions& options = {});
inline LiftResult stable_lift(const SkewSystem& s, const SkewState& zeta, const BasePoint& z,
                              const LiftOptions& options = {}) {
  return lift(s, zeta, z, LeafSide::s, options);
}
inline LiftResult unstable_lift(const SkewSystem& s, const SkewState& zeta, const BasePoint& z,
                                const LiftOptions& options = {}) {
  return lift(s, zeta, z, LeafSide::u, options);
}

struct LiftedLeaf {
  SkewState anchor;
  LeafSide side = LeafSide::s;
  std::vector<BasePoint> points;
  std::vector<double> values;
  double lipschitz_estimate = 0;
  bool converged = true;
};

/// Samples of the leaf through zeta at `samples` points of the local
/// stable (unstable) set within distance `radius`.
LiftedLeaf lifted_leaf(const SkewSystem& s, const SkewState& zeta, LeafSide side, int samples, double radius,
                       std::uint64_t seed, const LiftOptions& options = {});

/// sup over the leaf's points z of |F(z, eta_z) - leaf(F zeta)(f z)|.
double leaf_invariance_deviation(const SkewSystem& s, const LiftedLeaf& leaf, const LiftOptions& options = {});

/// Bound on leaf Lipschitz constants from the fiber derivative extremes of
/// the domination test and the Lipschitz constants of Phi and Phi^-1 in the
/// base; infinite when the series does not converge.
double leaf_lipschitz_bound(const SkewSystem& s, LeafSide side, const DominationReport& dom,
                            std::size_t pairs = 2000, std::uint64_t seed = 1);

struct ReturnClaim {
  double delta = 0;      // base near-return radius
  double epsilon = 0;    // allowed fiber displacement
  double worst_displacement = 0;
  double worst_base_distance = 0;
  long worst_index = 0;
  long near_returns = 0;
  bool violated = false;
  // (delta', largest fiber displacement over near returns closer than delta')
  std::vector<std::pair<double, double>> observed;
};

struct OrbitClosureSection {
  SkewState anchor;
  GridFunction<CirclePoint> values;
  std::vector<long> visit_trace;  // orbit index of each cell's value
  ReturnClaim claim;

  double at(const BasePoint& x) const { return values.at(x).y; }
};

struct SectionOptions {
  double return_epsilon = 0.1;
  double return_delta_cells = 2;  // near-return radius in cell diameters
  bool throw_on_violation = true;
};

OrbitClosureSection orbit_closure_section(const SkewSystem& s, const SkewState& zeta0, const DenseOrbitPlan& plan,
                                          const SectionOptions& options = {});

/// Section value at x carried along leaves from the representative r of the
/// cell of x: unstable lift to [r, x], then stable lift to x. Falls back to
/// grid interpolation where the bracket or a lift is unavailable.
double section_value(const SkewSystem& s, const OrbitClosureSection& section, const BasePoint& x);

/// sup over cells of |Phi(x)(value(x)) - value(f x)|.
double section_invariance_deviation(const SkewSystem& s, const OrbitClosureSection& section,
                                    const Exec& exec = default_exec());

struct SaturationReport {
  double worst_deviation = 0;
  std::size_t samples = 0;
  double section_lipschitz = 0;
  double leaf_bound = 0;          // max of the s and u leaf bounds
  double product_constant = 0;    // sup (d(x,[x,y]) + d([x,y],y)) / d(x,y)
  bool lipschitz_consistent = true;
};

/// Leaves through sampled section points against the section's own values.
SaturationReport saturation_check(const OrbitClosureSection& section, const SkewSystem& s, std::size_t samples,
                                  std::uint64_t seed = 1, const Exec& exec = default_exec());

/// Orbit-closure sections through equispaced fiber anchors over x0, all
/// built from the same two-sided plan.
struct Atlas {
  DenseOrbitPlan plan;
  std::vector<OrbitClosureSection> sections;
  double max_gap = 0;  // largest fiber gap between consecutive sections

  std::size_t anchors() const { return sections.size(); }
};

struct AtlasOptions {
  int anchors = 32;
  int max_anchors = 128;
  SectionOptions section;
};

Atlas build_atlas(const SkewSystem& s, const DenseOrbitPlan& plan, const AtlasOptions& options = {});

struct HolonomyMap {
  BasePoint from;
  BasePoint to;
  CircleDiffeo map;
  double derivative_bound = 0;
};

/// Value over y of the section through (x, eta), with cubic Hermite
/// interpolation across anchors; the Jet carries the fiber derivative.
Jet holonomy_apply(const Atlas& atlas, const BasePoint& x, const BasePoint& y, double eta);
HolonomyMap holonomy(const Atlas& atlas, const BasePoint& x, const BasePoint& y, int fiber_samples = 256);

/// sup |H_{y,z} H_{x,y} - H_{x,z}| over random triples and fiber samples.
double groupoid_deviation(const Atlas& atlas, const HyperbolicBase& base, std::size_t triples, std::uint64_t seed,
                          int fiber_samples = 64);

struct Trivialization {
  GridFunction<CircleDiffeo> h;  // fiber part of H at each cell: holonomy to x0
  double conjugacy_residual = 0;
};

Trivialization trivialize(const SkewSystem& s, const Atlas& atlas, int fiber_samples = 256,
                          const Exec& exec = default_exec());

struct LinearAlongSection {
  std::vector<double> values;  // fiber derivative of Phi at the section point of each cell
  Solution<Eigen::MatrixXd> solution;
  // Bound of the product of fiber derivatives along section orbits by the
  // spread of the transfer function, and the observed sup over n <= horizon.
  double transfer_spread = 0;
  double observed_sup = 0;
  double observed_sup_half = 0;  // the same over n <= horizon / 2
};

/// d_fib F along the section as a 1 x 1 cocycle over f, solved linearly.
LinearAlongSection derivative_cocycle_along_section(const SkewSystem& s, const OrbitClosureSection& section,
                                                    const DenseOrbitPlan& plan, long horizon = 1000,
                                                    const SolveOptions& options = {},
                                                    const Exec& exec = default_exec());

/// sup over sampled states of |d_fib F^n| for n <= horizon, and for n <= horizon / 2.
std::pair<double, double> uniform_derivative_bound(const SkewSystem& s, std::size_t states, long horizon,
                                                   std::uint64_t seed, const Exec& exec = default_exec());

struct SmoothnessReport {
  double finite_difference = 0;   // holonomy derivative by central differences
  double orbit_limit = 0;         // derivative of Phi^(n_i)(x) for the closest approach found
  std::vector<std::pair<double, double>> approach;  // (d(f^n x, y), derivative of Phi^(n)(x))
  double deviation = 0;
};

SmoothnessReport holonomy_smoothness_check(const SkewSystem& s, const BasePoint& x, const BasePoint& y,
                                           const Atlas& atlas, double eta, long search = 200000);

}  // namespace livsic
