#pragma once

// PPT relaxation of the two-hypothesis discrimination problem on N copies.
//
// The measurement operator E is taken permutation and partial-transpose invariant, so it
// is parametrized by E^q_r (see blocks.hpp) and PPT holds automatically; what remains is
// 0 <= E^(j) <= 1 on every spin block. The objective is
//   c.x = sum_j n_j tr[(sigma0^(j) - sigma1^(j)) E^(j)(x)]
// and the bound is P_e = (1 + min c.x) / 2.

#include <memory>
#include <vector>

#include "mixdisc/blocks.hpp"
#include "mixdisc/qubit.hpp"

namespace mixdisc {

struct SDPInstance {
  int n_copies = 0;
  std::vector<double> objective;
  std::shared_ptr<const BlockMapTable> maps;
  /// P_e = constant_offset * (1 + value).
  double constant_offset = 0.5;
};

enum class SolverStatus { Converged, MaxIterations, NumericalFailure };

const char* to_string(SolverStatus status);

struct SDPSolution {
  double value = 0.0;
  ParamVector params{1};
  /// Suboptimality bound at exit (mu * sum_j 2(2j+1), in objective units).
  double gap = 0.0;
  int iterations = 0;  ///< Newton steps
  SolverStatus status = SolverStatus::Converged;
  /// c.x after each outer (mu) stage.
  std::vector<double> outer_values;
  /// Extreme eigenvalues over all blocks of E(params).
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_newton_steps = 500;
  double mu0 = 1.0;
  double mu_factor = 0.2;
};

/// 1e-8 up to N = 25, 1e-7 beyond.
double default_tolerance(int n_copies);

SDPInstance build_ppt_instance(const StatePair& pair, int n_copies);

/// Log-barrier interior point method started from E = I/2. Throws DomainError for
/// tol < 1e-10.
SDPSolution solve(const SDPInstance& instance, const SolverOptions& options = {});

struct PptResult {
  double error = 0.5;
  SDPSolution solution;
};

/// tol <= 0 selects default_tolerance(n_copies).
PptResult ppt_error(const StatePair& pair, int n_copies, double tol = 0.0);

}  // namespace mixdisc
