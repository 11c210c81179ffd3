#pragma once

#include <cstdint>
#include <functional>

namespace mixdisc {

struct ScalarMin {
  double x;
  double value;
};

/// Golden-section search for the minimum of a unimodal function on [lo, hi].
/// Both endpoints are also evaluated and win if they are lower.
ScalarMin golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                             double tol = 1e-12);

// GCC/Clang extension type; spelled once here so -Wpedantic stays quiet elsewhere.
__extension__ using uint128 = unsigned __int128;

/// Exact binomial coefficient. Throws DomainError if the result does not fit in 128 bits.
uint128 binomial_exact(int n, int k);

/// Binomial coefficient as a double; exact below 2^53, log-gamma based above.
double binomial(int n, int k);

/// log C(n, k) via log-gamma; -inf outside 0 <= k <= n.
double log_binomial(int n, int k);

/// log(n!) via log-gamma; +inf for negative n.
double log_factorial(int n);

}  // namespace mixdisc
