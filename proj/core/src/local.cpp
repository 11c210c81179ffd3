#include "mixdisc/local.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "mixdisc/errors.hpp"
#include "mixdisc/numeric.hpp"

namespace mixdisc {
namespace {

using std::numbers::pi;

// n log p with 0 log 0 = 0.
double xlogy(int n, double p) {
  if (n == 0) return 0.0;
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  return n * std::log(p);
}

double limit_pow(double base, double exponent) { return base <= 0.0 ? 0.0 : std::pow(base, exponent); }

double canonical_angle(const StatePair& pair, double theta) {
  if (pair.equal_purities() && theta > pi / 2) return pi - theta;
  return theta;
}

// Minimizes f over [0, pi]: coarse grid, then golden-section around the best local minima.
ScalarMin grid_then_refine(const std::function<double(double)>& f, int basins) {
  const int points = kAngleGridPoints;
  std::vector<double> angles(points), values(points);
  for (int i = 0; i < points; ++i) {
    angles[i] = pi * i / (points - 1);
    values[i] = f(angles[i]);
  }
  std::vector<int> minima;
  for (int i = 0; i < points; ++i) {
    const bool left_ok = i == 0 || values[i] <= values[i - 1];
    const bool right_ok = i == points - 1 || values[i] <= values[i + 1];
    if (left_ok && right_ok) minima.push_back(i);
  }
  std::sort(minima.begin(), minima.end(), [&](int a, int b) {
    return values[a] < values[b] || (values[a] == values[b] && a < b);
  });
  if (static_cast<int>(minima.size()) > basins) minima.resize(basins);

  const int first = minima.empty() ? 0 : minima.front();
  ScalarMin best{angles[first], values[first]};
  for (int i : minima) {
    const double lo = angles[std::max(i - 1, 0)];
    const double hi = angles[std::min(i + 1, points - 1)];
    const ScalarMin local = golden_section_min(f, lo, hi, 1e-11);
    if (local.value < best.value) best = local;
  }
  return best;
}

}  // namespace

Measurement1D outcome_probs(const StatePair& pair, double theta_meas) {
  Measurement1D m;
  m.theta_meas = theta_meas;
  // 1 -/+ r cos(x) = (1 - r) + 2 r sin^2(x/2) or cos^2(x/2): no cancellation when
  // r cos(x) is close to +/-1, where the small probability sets the exponent.
  const auto half = [](double r, double trig) {
    return std::clamp(((1 - r) + 2 * r * trig * trig) / 2, 0.0, 1.0);
  };
  const double x0 = (theta_meas - pair.theta / 2) / 2, x1 = (theta_meas + pair.theta / 2) / 2;
  m.p0 = half(pair.r0, std::cos(x0));
  m.p1 = half(pair.r1, std::cos(x1));
  m.q0 = half(pair.r0, std::sin(x0));
  m.q1 = half(pair.r1, std::sin(x1));
  return m;
}

double repeated_error(const StatePair& pair, int n_copies, double theta_meas) {
  if (n_copies < 1) throw DomainError("repeated_error: N must be >= 1");
  const Measurement1D m = outcome_probs(pair, theta_meas);
  if (m.p0 == m.p1) return 0.5;  // the binomial sum would only reach 1/2 up to rounding
  double total = 0.0;
  if (n_copies <= 30) {
    for (int n = 0; n <= n_copies; ++n) {
      const double l0 = std::pow(m.p0, n) * std::pow(m.q0, n_copies - n);
      const double l1 = std::pow(m.p1, n) * std::pow(m.q1, n_copies - n);
      total += binomial(n_copies, n) * std::min(l0, l1);
    }
  } else {
    for (int n = 0; n <= n_copies; ++n) {
      const double l0 = xlogy(n, m.p0) + xlogy(n_copies - n, m.q0);
      const double l1 = xlogy(n, m.p1) + xlogy(n_copies - n, m.q1);
      const double lo = std::min(l0, l1);
      if (std::isinf(lo)) continue;
      total += std::exp(log_binomial(n_copies, n) + lo);
    }
  }
  return std::clamp(0.5 * total, 0.0, 0.5);
}

RepeatedOptimum repeated_error_opt(const StatePair& pair, int n_copies) {
  if (n_copies < 1) throw DomainError("repeated_error_opt: N must be >= 1");
  const ScalarMin best =
      grid_then_refine([&](double t) { return repeated_error(pair, n_copies, t); }, 3);
  return {best.value, canonical_angle(pair, best.x)};
}

double classical_chernoff_exponent(const StatePair& pair, double theta_meas) {
  const Measurement1D m = outcome_probs(pair, theta_meas);
  if (m.p0 == m.p1) return 0.0;
  const ScalarMin best = golden_section_min(
      [&](double s) {
        return limit_pow(m.p0, s) * limit_pow(m.p1, 1 - s) +
               limit_pow(m.q0, s) * limit_pow(m.q1, 1 - s);
      },
      0.0, 1.0, 1e-12);
  if (best.value <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, -std::log(best.value));
}

ExponentOptimum repeated_exponent_opt(const StatePair& pair) {
  if (pair.identical()) return {0.0, pi / 2};
  const ScalarMin best =
      grid_then_refine([&](double t) { return -classical_chernoff_exponent(pair, t); }, 3);
  return {-best.value, canonical_angle(pair, best.x)};
}

DecisionSummary classify_decision_rule(const StatePair& pair, int n_copies, double theta_meas) {
  if (n_copies < 1) throw DomainError("classify_decision_rule: N must be >= 1");
  const Measurement1D m = outcome_probs(pair, theta_meas);
  DecisionSummary out;
  if (m.p0 == m.p1) return out;
  out.plus_favors = m.p0 > m.p1 ? 0 : 1;
  const double p_fav = out.plus_favors == 0 ? m.p0 : m.p1;
  const double p_other = out.plus_favors == 0 ? m.p1 : m.p0;
  const double q_fav = out.plus_favors == 0 ? m.q0 : m.q1;
  const double q_other = out.plus_favors == 0 ? m.q1 : m.q0;
  // log-likelihood ratio of the favored hypothesis grows with the "+" count
  out.threshold = n_copies + 1;
  for (int n = 0; n <= n_copies; ++n) {
    const double lf = xlogy(n, p_fav) + xlogy(n_copies - n, q_fav);
    const double lo = xlogy(n, p_other) + xlogy(n_copies - n, q_other);
    if (lf >= lo) {
      out.threshold = n;
      break;
    }
  }
  if (out.threshold == 0 || out.threshold == n_copies + 1) {
    out.rule = DecisionRule::Constant;
  } else if (n_copies >= 3 && (out.threshold == 1 || out.threshold == n_copies)) {
    out.rule = DecisionRule::Unanimity;
  } else {
    out.rule = DecisionRule::MajorityLike;
  }
  return out;
}

const char* to_string(DecisionRule rule) {
  switch (rule) {
    case DecisionRule::Constant: return "constant";
    case DecisionRule::MajorityLike: return "majority";
    case DecisionRule::Unanimity: return "unanimity";
  }
  return "unknown";
}

CriticalPurity critical_purity(double theta, double tol) {
  if (!(theta > 0.0 && theta < pi)) throw DomainError("critical_purity: theta must lie in (0, pi)");
  auto departed = [&](double r) {
    const ExponentOptimum opt = repeated_exponent_opt(make_state_pair(r, r, theta));
    return std::abs(opt.theta_star - pi / 2) > kCriticalAngleTolerance;
  };
  // Coarse scan for the first departure, then bisection inside that cell.
  std::vector<double> scan;
  for (int k = 1; k <= 99; ++k) scan.push_back(k / 100.0);
  scan.insert(scan.end(), {0.995, 0.999, 0.9999});
  double lo = 0.0;
  for (double r : scan) {
    if (departed(r)) {
      double hi = r;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (departed(mid) ? hi : lo) = mid;
      }
      return {0.5 * (lo + hi), true};
    }
    lo = r;
  }
  return {1.0, false};
}

}  // namespace mixdisc
