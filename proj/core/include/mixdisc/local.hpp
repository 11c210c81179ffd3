#pragma once

// Fixed local ("repeated") strategy: the same two-outcome projective measurement on every
// copy, followed by the Bayes decision on the number of "+" outcomes.
//
// A measurement is a unit Bloch vector in the x-z plane at polar angle theta_meas from the
// bisector (z) axis. Outcome "+" has probability p_a = (1 + r_a cos(theta_meas -/+ theta/2))/2.

#include "mixdisc/qubit.hpp"

namespace mixdisc {

/// Resolution of the coarse angle grid used before golden-section refinement.
inline constexpr int kAngleGridPoints = 181;

struct Measurement1D {
  double theta_meas = 0.0;
  double p0 = 0.5;  ///< P("+" | state 0)
  double p1 = 0.5;  ///< P("+" | state 1)
  /// P("-" | state a), computed directly so that it keeps full relative precision when
  /// p_a is close to 1.
  double q0 = 0.5;
  double q1 = 0.5;
};

Measurement1D outcome_probs(const StatePair& pair, double theta_meas);

/// Error probability of the Bayes rule on outcome counts for a fixed angle.
double repeated_error(const StatePair& pair, int n_copies, double theta_meas);

struct RepeatedOptimum {
  double error = 0.5;
  double theta_star = 0.0;
};

/// Minimizes repeated_error over the angle. For equal purities the result is reported on
/// the branch theta_star <= pi/2 (the problem is symmetric under theta -> pi - theta).
/// When the error is flat (r = 0) the first grid angle is returned.
RepeatedOptimum repeated_error_opt(const StatePair& pair, int n_copies);

/// Classical Chernoff exponent of the two outcome distributions at this angle.
double classical_chernoff_exponent(const StatePair& pair, double theta_meas);

struct ExponentOptimum {
  double exponent = 0.0;
  double theta_star = 0.0;
};

/// Best asymptotic exponent of a repeated measurement (maximum over the angle).
ExponentOptimum repeated_exponent_opt(const StatePair& pair);

enum class DecisionRule {
  Constant,      ///< the same guess for every count
  MajorityLike,  ///< decision threshold strictly inside the count range
  Unanimity,     ///< one hypothesis only on a unanimous record
};

struct DecisionSummary {
  DecisionRule rule = DecisionRule::Constant;
  /// Smallest "+" count for which the hypothesis favored by "+" is chosen.
  int threshold = 0;
  /// Hypothesis (0 or 1) that "+" outcomes favor.
  int plus_favors = 0;
};

/// Which classical voting rule the Bayes decision reduces to at this angle.
DecisionSummary classify_decision_rule(const StatePair& pair, int n_copies, double theta_meas);

const char* to_string(DecisionRule rule);

/// Angular tolerance for "the optimal angle has left pi/2".
inline constexpr double kCriticalAngleTolerance = 1e-4;

struct CriticalPurity {
  double value = 1.0;
  bool found = false;
};

/// Smallest equal purity r at which the exponent-maximizing angle departs from pi/2 by
/// more than kCriticalAngleTolerance, located to `tol` by bisection.
CriticalPurity critical_purity(double theta, double tol = 1e-6);

}  // namespace mixdisc
