#pragma once

// One-way adaptive local strategy for two hypotheses, optimized by backward dynamic
// programming over the prior pi = P(state 0).
//
// S*_n(pi) is the best success probability when copies n+1..N remain to be measured and
// the current prior is pi; S*_N(pi) = max(pi, 1 - pi). Each copy is measured along a
// Bloch direction at angle theta (see local.hpp); outcome 0 is the "+" projector.
//
// Between lattice nodes S*_n is not interpolated by chords. Each node keeps the success
// probabilities of its optimal strategy conditioned on each hypothesis, i.e. a supporting
// line of the convex function S*_n, and off-node values are the larger of the two
// neighbouring lines. Kinks of S*_n (which chords smear out at first order in the spacing)
// are then represented exactly, and every tabulated value is attained by a concrete
// adaptive strategy, so the reported error never undershoots the true optimum except
// through the angle search.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mixdisc/qubit.hpp"

namespace mixdisc {

inline constexpr int kDefaultPriorGridPoints = 20000;

/// Uniform lattice on [0, 1] including both endpoints.
class PriorGrid {
 public:
  explicit PriorGrid(int points = kDefaultPriorGridPoints);

  int size() const { return points_; }
  double node(int i) const { return static_cast<double>(i) / (points_ - 1); }
  int nearest(double prior) const;

  /// Chord (piecewise-linear) interpolation of nodal values at `prior`.
  double interpolate(std::span<const double> values, double prior) const;

  /// Index i of the cell [node(i), node(i+1)] containing `prior`.
  int cell(double prior) const;

 private:
  int points_;
};

/// Inner maximization over the measurement angle.
struct AngleSearch {
  int coarse_points = 181;
  bool refine = true;
  double refine_tol = 1e-9;

  std::vector<double> coarse_angles() const;
};

struct ValueTable {
  /// stages[n][i] = S*_n at grid node i, n = 0..N.
  std::vector<std::vector<double>> stages;
  /// Success probability of node i's strategy given state 0 (given_0) or state 1 (given_1);
  /// stages[n][i] = node * given_0 + (1 - node) * given_1.
  std::vector<std::vector<double>> given_0;
  std::vector<std::vector<double>> given_1;

  /// Supporting-line interpolation of stage n at an arbitrary prior.
  double evaluate(int n, double prior) const;
};

struct Policy {
  /// angles[n][i] = optimal angle for copy n+1 when the prior is node i, n = 0..N-1.
  std::vector<std::vector<double>> angles;
};

enum class DpStatus {
  Ok,
  NonMonotone,  ///< S*_n < S*_{n+1} somewhere beyond 1e-12: grid too coarse
};

struct DpResult {
  int n_copies = 0;
  PriorGrid grid{2};
  ValueTable values;
  Policy policy;
  /// error_by_copies[k]: error with k copies at prior 1/2, k = 0..N (stationary recursion).
  std::vector<double> error_by_copies;
  double error = 0.5;  ///< error_by_copies[N]
  DpStatus status = DpStatus::Ok;
};

/// Posterior P(state 0) after an outcome with likelihoods like0 = p(outcome|0) and
/// like1 = p(outcome|1). Throws DomainError if the outcome has zero probability.
double bayes_update(double prior, double like0, double like1);

/// Same, for outcome 0 ("+") or 1 of a measurement at angle theta_meas.
double bayes_update(double prior, int outcome, double theta_meas, const StatePair& pair);

/// Backward recursion over the prior lattice.
/// Within a stage nodes are independent and are processed by `workers` threads.
DpResult dp_solve(const StatePair& pair, int n_copies, const PriorGrid& grid = PriorGrid(),
                  const AngleSearch& search = {}, int workers = 1);

struct AdaptiveValue {
  double success = 1.0;
  double error = 0.0;
};

/// The same recursion evaluated on exact posteriors (no lattice), maximizing over the
/// coarse angles only. Cost grows like (2 * angles)^N; guarded at 1e8 evaluations.
AdaptiveValue dp_exact(const StatePair& pair, int n_copies, double prior,
                       std::span<const double> angles);

/// Nested max/sum over outcome trees using joint probabilities of whole outcome records
/// and a final Bayes decision. N <= 3.
AdaptiveValue brute_force_adaptive(const StatePair& pair, int n_copies,
                                   std::span<const double> angles, double prior = 0.5);

struct SimulationResult {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double success_rate = 0.0;
  double std_error = 0.0;  ///< binomial standard error of success_rate
};

/// Monte Carlo rollouts of the tabulated policy with state `which_true` as the truth.
/// Trial t draws from a counter-based stream keyed by (seed, t), so the result does not
/// depend on `workers`.
SimulationResult simulate(const DpResult& dp, const StatePair& pair, int which_true,
                          std::uint64_t trials, std::uint64_t seed, int workers = 1);

/// Columnar text dump: one line per (stage, node) with "stage prior value angle".
void write_policy_table(std::ostream& out, const DpResult& dp);

struct PolicyTableData {
  int n_copies = 0;
  int grid_points = 0;
  ValueTable values;
  Policy policy;
};

PolicyTableData read_policy_table(std::istream& in);

}  // namespace mixdisc
