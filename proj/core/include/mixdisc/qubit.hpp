#pragma once

#include <Eigen/Dense>

namespace mixdisc {

/// Two real single-qubit states with Bloch vectors in the x-z plane, placed at polar
/// angles +theta/2 (state 0) and -theta/2 (state 1) from the z axis.
///
/// Basis ordering follows the computational basis: index 0 is |0>, which maps to the
/// spin-up magnetic number m = +1/2.
struct StatePair {
  double r0 = 0.0;
  double r1 = 0.0;
  double theta = 0.0;
  Eigen::Matrix2d rho0 = Eigen::Matrix2d::Identity() / 2;
  Eigen::Matrix2d rho1 = Eigen::Matrix2d::Identity() / 2;

  const Eigen::Matrix2d& rho(int which) const { return which == 0 ? rho0 : rho1; }
  double purity(int which) const { return which == 0 ? r0 : r1; }

  /// True when the two density matrices coincide entry-wise.
  bool identical() const { return rho0 == rho1; }
  bool equal_purities() const { return r0 == r1; }
};

/// Builds the pair from Bloch data. Throws DomainError naming the offending field when a
/// purity lies outside [0, 1] or theta outside [0, pi].
StatePair make_state_pair(double r0, double r1, double theta);

/// Uhlmann fidelity (tr|sqrt(rho0) sqrt(rho1)|)^2 via the 2x2 closed form
/// tr(rho0 rho1) + 2 sqrt(det rho0 det rho1).
double fidelity(const StatePair& pair);

/// -log min_s tr(rho0^s rho1^(1-s)), the asymptotic exponent of the collective strategy.
double quantum_chernoff_exponent(const StatePair& pair);

/// tr(rho0^s rho1^(1-s)); zero eigenvalues contribute zero for every s (the s -> 0+ limit).
double chernoff_trace(const StatePair& pair, double s);

struct ExponentBounds {
  double lower = 0.0;  ///< -(1/2) log F
  double upper = 0.0;  ///< -log F
  bool orthogonal = false;  ///< F == 0, both bounds are +inf
};

ExponentBounds fidelity_exponent_bounds(const StatePair& pair);

}  // namespace mixdisc
