#include "mixdisc/numeric.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mixdisc/errors.hpp"

namespace mixdisc {

ScalarMin golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                             double tol) {
  static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  ScalarMin best = fc <= fd ? ScalarMin{c, fc} : ScalarMin{d, fd};
  const double flo = f(lo);
  if (flo < best.value) best = {lo, flo};
  const double fhi = f(hi);
  if (fhi < best.value) best = {hi, fhi};
  return best;
}

uint128 binomial_exact(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  uint128 result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step.
    const uint128 factor = static_cast<uint128>(n - k + i);
    if (result > std::numeric_limits<uint128>::max() / factor) {
      throw DomainError("binomial_exact: C(" + std::to_string(n) + "," + std::to_string(k) +
                        ") overflows 128 bits");
    }
    result = result * factor / static_cast<uint128>(i);
  }
  return result;
}

double log_factorial(int n) {
  if (n < 0) return std::numeric_limits<double>::infinity();
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  if (n <= 120) {
    const uint128 exact = binomial_exact(n, k);
    return static_cast<double>(exact);
  }
  return std::exp(log_binomial(n, k));
}

}  // namespace mixdisc
