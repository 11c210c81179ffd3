#pragma once

#include "mixdisc/qubit.hpp"

namespace mixdisc {

/// Minimum error probability of the optimal joint measurement on N copies (equal priors),
/// (1/2)(1 - (1/2) sum_j n_j ||sigma0^(j) - sigma1^(j)||_1). Block sizes are at most N+1,
/// so this works for any N whose degeneracies fit in 64 bits.
double collective_error(const StatePair& pair, int n_copies);

/// Same quantity from the full 2^N eigendecomposition; N <= kMaxDenseCopies.
double collective_error_dense(const StatePair& pair, int n_copies);

}  // namespace mixdisc
