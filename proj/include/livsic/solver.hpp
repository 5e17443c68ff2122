#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "livsic/cocycle.hpp"
#include "livsic/grid_function.hpp"

namespace livsic {

/// Solution of u(f x) = Phi(x) u(x) on the cells of a plan's grid. Each cell
/// holds the value at its first-visit orbit point.
template <class T>
struct TransferFunction {
  GridFunction<T> u;
  T normalization{};  // value at the plan's start point
  BasePoint x0;
  long N = 0;
  double alpha = 1;
  std::optional<double> holder_norm;

  T at(const BasePoint& x) const { return u.at(x); }
};

struct SolveOptions {
  long poo_period = 6;
  double poo_tolerance = 1e-4;
  bool check_poo = true;
  double tolerance = 5e-3;
  int fiber_samples = CircleDiffeo::default_grid;
  long refresh_every = 512;      // degree renormalization of the composition chain
  double max_condition = 1e8;    // linear solves
};

struct SolveReport {
  double residual_C0 = 0;
  double residual_C1 = 0;
  // Along the orbit itself, between consecutive first visits.
  double orbit_residual = 0;
  // sup over sampled x of d(Phi^(n)(x), u(f^n x) u(x)^-1), n in {2, 5, 10}.
  double iterated_residual = 0;
  std::vector<double> cell_residual;
  std::size_t worst_cell = 0;
  long orbit_length_used = 0;
  std::optional<double> holder_ratio;
  double tolerance = 0;
  bool pass = true;
};

template <class T>
struct Solution {
  TransferFunction<T> u;
  SolveReport report;
};

/// u o f - u = phi, normalized by u(x0) = 0.
Solution<double> solve_real(const HyperbolicBase& base, const std::function<double(const BasePoint&)>& phi,
                            const DenseOrbitPlan& plan, const SolveOptions& options = {},
                            const Exec& exec = default_exec());
/// A(x) = U(f x) U(x)^-1 with U(x0) = anchor.
Solution<Eigen::MatrixXd> solve_linear(const SkewSystem& s, const DenseOrbitPlan& plan, const Eigen::MatrixXd& anchor,
                                       const SolveOptions& options = {}, const Exec& exec = default_exec());
/// Phi(x) = u(f x) o u(x)^-1 with u(x0) = anchor.
Solution<CircleDiffeo> solve_diffeo(const SkewSystem& s, const DenseOrbitPlan& plan, const CircleDiffeo& anchor,
                                    const SolveOptions& options = {}, const Exec& exec = default_exec());

SolveReport verify_coboundary(const HyperbolicBase& base, const std::function<double(const BasePoint&)>& phi,
                              const TransferFunction<double>& u, double tolerance = 5e-3,
                              const Exec& exec = default_exec());
SolveReport verify_coboundary(const SkewSystem& s, const TransferFunction<Eigen::MatrixXd>& u,
                              double tolerance = 1e-3, const Exec& exec = default_exec());
SolveReport verify_coboundary(const SkewSystem& s, const TransferFunction<CircleDiffeo>& u,
                              double tolerance = 5e-3, const Exec& exec = default_exec());

/// |u|_alpha / |Phi|_alpha from empirical Hoelder quotients; empty when
/// |Phi|_alpha < 1e-12 (a constant cocycle).
std::optional<double> holder_bound_check(const TransferFunction<Eigen::MatrixXd>& u, const SkewSystem& s,
                                         std::size_t samples = 4000, std::uint64_t seed = 1,
                                         const Exec& exec = default_exec());
std::optional<double> holder_bound_check(const TransferFunction<CircleDiffeo>& u, const SkewSystem& s,
                                         std::size_t samples = 4000, std::uint64_t seed = 1,
                                         const Exec& exec = default_exec());
/// Empirical |u|_alpha over neighbouring and random pairs of cells.
double transfer_holder_norm(const TransferFunction<Eigen::MatrixXd>& u, const HyperbolicBase& base, double alpha);
double transfer_holder_norm(const TransferFunction<CircleDiffeo>& u, const HyperbolicBase& base, double alpha);

struct UniquenessReport {
  double deviation = 0;       // sup over cells after normalizing both at the first start point
  double transport_error = 0; // larger residual_C0 of the two solves
  bool pass = true;           // deviation <= 2 transport_error (+ rounding floor)
};

UniquenessReport uniqueness_check(const Solution<Eigen::MatrixXd>& a, const Solution<Eigen::MatrixXd>& b);
UniquenessReport uniqueness_check(const Solution<CircleDiffeo>& a, const Solution<CircleDiffeo>& b);

struct ContinuityRow {
  double t = 0;
  double residual_C0 = 0;
  double variation = 0;  // sup distance to the previous member's solution
  double dt = 0;
};

struct ContinuityReport {
  std::vector<ContinuityRow> rows;
  double max_modulus = 0;  // max variation / dt
};

/// Solves every member with the same plan and anchor.
ContinuityReport continuity_in_parameter(const std::function<SkewSystem(double)>& family, const std::vector<double>& t_grid,
                                         const DenseOrbitPlan& plan, const Eigen::MatrixXd& anchor,
                                         const SolveOptions& options = {}, const Exec& exec = default_exec());
ContinuityReport continuity_in_parameter(const std::function<SkewSystem(double)>& family, const std::vector<double>& t_grid,
                                         const DenseOrbitPlan& plan, const CircleDiffeo& anchor,
                                         const SolveOptions& options = {}, const Exec& exec = default_exec());

/// x -> u(f x) o u(x)^-1 evaluated through the grid function.
CircleCocycle make_coboundary(std::shared_ptr<const HyperbolicBase> base, const TransferFunction<CircleDiffeo>& u);

double value_distance(double a, double b);
double value_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
/// C^0 distance on the fiber sample grid.
double value_distance(const CircleDiffeo& a, const CircleDiffeo& b);

}  // namespace livsic
