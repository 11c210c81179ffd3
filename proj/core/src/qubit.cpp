#include "mixdisc/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mixdisc/errors.hpp"
#include "mixdisc/numeric.hpp"

namespace mixdisc {
namespace {

// Eigenvalues below this are treated as exact zeros (pure states).
constexpr double kZeroEigen = 1e-14;

struct Eigen2 {
  double values[2];
  Eigen::Vector2d vectors[2];
};

Eigen2 eigen_symmetric_2x2(const Eigen::Matrix2d& m) {
  const double a = m(0, 0);
  const double d = m(1, 1);
  const double b = 0.5 * (m(0, 1) + m(1, 0));
  const double mean = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double radius = std::hypot(half_diff, b);
  Eigen2 out;
  out.values[0] = mean + radius;
  out.values[1] = mean - radius;
  // Eigenvector of the larger eigenvalue at angle phi/2, tan(phi) = b / half_diff.
  const double half_angle = 0.5 * std::atan2(b, half_diff);
  out.vectors[0] = Eigen::Vector2d(std::cos(half_angle), std::sin(half_angle));
  out.vectors[1] = Eigen::Vector2d(-std::sin(half_angle), std::cos(half_angle));
  return out;
}

double safe_pow(double base, double exponent) {
  if (base <= kZeroEigen) return 0.0;
  return std::pow(base, exponent);
}

void check_unit(double value, const char* field) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError(std::string("make_state_pair: ") + field + " = " + std::to_string(value) +
                      " outside [0, 1]");
  }
}

}  // namespace

StatePair make_state_pair(double r0, double r1, double theta) {
  check_unit(r0, "r0");
  check_unit(r1, "r1");
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw DomainError("make_state_pair: theta = " + std::to_string(theta) +
                      " outside [0, pi]");
  }
  StatePair pair;
  pair.r0 = r0;
  pair.r1 = r1;
  pair.theta = theta;
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  auto build = [&](double r, double sign) {
    Eigen::Matrix2d rho;
    rho(0, 0) = (1 + r * c) / 2;
    rho(1, 1) = (1 - r * c) / 2;
    rho(0, 1) = rho(1, 0) = sign * r * s / 2;
    return rho;
  };
  pair.rho0 = build(r0, 1.0);
  pair.rho1 = build(r1, -1.0);
  return pair;
}

double fidelity(const StatePair& pair) {
  const double overlap = (pair.rho0 * pair.rho1).trace();
  // det rho = (1 - r^2)/4 from the Bloch radius; the matrix determinant of a pure state
  // carries ~1e-17 of roundoff, which the square root would lift to ~1e-9.
  const double dets = (1 - pair.r0 * pair.r0) * (1 - pair.r1 * pair.r1) / 16;
  return std::clamp(overlap + 2 * std::sqrt(dets), 0.0, 1.0);
}

double chernoff_trace(const StatePair& pair, double s) {
  const Eigen2 e0 = eigen_symmetric_2x2(pair.rho0);
  const Eigen2 e1 = eigen_symmetric_2x2(pair.rho1);
  double total = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double a = safe_pow(e0.values[i], s);
    if (a == 0.0) continue;
    for (int k = 0; k < 2; ++k) {
      const double b = safe_pow(e1.values[k], 1 - s);
      const double overlap = e0.vectors[i].dot(e1.vectors[k]);
      total += a * b * overlap * overlap;
    }
  }
  return total;
}

double quantum_chernoff_exponent(const StatePair& pair) {
  if (pair.identical()) return 0.0;
  const ScalarMin best =
      golden_section_min([&](double s) { return chernoff_trace(pair, s); }, 0.0, 1.0, 1e-12);
  if (best.value <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, -std::log(best.value));
}

ExponentBounds fidelity_exponent_bounds(const StatePair& pair) {
  const double f = fidelity(pair);
  ExponentBounds out;
  if (f <= 0.0) {
    out.lower = out.upper = std::numeric_limits<double>::infinity();
    out.orthogonal = true;
    return out;
  }
  out.lower = -0.5 * std::log(f);
  out.upper = 2 * out.lower;
  return out;
}

}  // namespace mixdisc
