#pragma once

// Sweeps over N and over the purity, the collective/PPT rate gap, rate fits and the
// copies ratio, plus CSV/JSON emission of the resulting tables.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mixdisc/qubit.hpp"

namespace mixdisc {

enum class Strategy { Collective, Ppt, Repeated, Adaptive };

const char* to_string(Strategy s);
/// Accepts "collective", "ppt", "repeated", "adaptive". Throws DomainError otherwise.
Strategy parse_strategy(std::string_view name);
std::vector<Strategy> all_strategies();

enum class OutputFormat { Csv, Json };
OutputFormat parse_format(std::string_view name);

/// Largest N accepted for the block strategies unless allow_large is set.
inline constexpr int kMaxSweepCopies = 40;

struct SweepSpec {
  double r0 = 0.8;
  double r1 = 0.8;
  double theta = 1.5707963267948966;
  /// sweep_r only: equal purities r0 = r1 = r for each entry.
  std::vector<double> r_values;
  int n_min = 1;
  int n_max = 1;
  std::vector<Strategy> strategies = all_strategies();
  /// PPT solver tolerance; <= 0 picks the per-N default.
  double tol = 0.0;
  int grid_points = 20000;
  int angle_points = 181;
  /// Row-wise ordering checks allow this much slack in P_e.
  double ordering_tol = 1e-5;
  std::uint64_t seed = 0;
  bool allow_large = false;
  /// <= 0 selects default_workers().
  int workers = 0;

  /// Throws DomainError naming the offending field.
  void validate() const;
};

struct Cell {
  double value = 0.0;  ///< P_e in sweep_n, C = -(1/N) log P_e in sweep_r
  std::string status = "ok";
};

struct SweepRow {
  int n = 0;
  double r0 = 0.0;
  double r1 = 0.0;
  double theta = 0.0;
  std::vector<Cell> cells;  ///< parallel to SweepTable::strategies
  /// False when collective <= ppt <= adaptive <= repeated fails beyond ordering_tol.
  bool ordered = true;
};

struct SweepTable {
  enum class Quantity { ErrorProbability, ErrorRate };
  Quantity quantity = Quantity::ErrorProbability;
  SweepSpec spec;
  std::vector<Strategy> strategies;
  std::vector<SweepRow> rows;
  double wall_seconds = 0.0;
};

/// One row per N in [n_min, n_max] with P_e per requested strategy. Cells run on a worker
/// pool; a failing cell is recorded in its status and the sweep continues.
SweepTable sweep_n(const SweepSpec& spec);

/// One row per r in spec.r_values (r0 = r1 = r) at N = n_max, with the rate
/// C = -(1/N) log P_e per strategy.
SweepTable sweep_r(const SweepSpec& spec);

struct GapResult {
  double delta = 0.0;
  double collective = 0.5;
  double ppt = 0.5;
  std::string ppt_status = "converged";
  /// Delta came out negative within solver accuracy and was set to 0.
  bool clamped = false;
  /// Delta is negative beyond solver accuracy (PPT below collective).
  bool violation = false;
};

/// Delta = -(1/N) log(P_e^col / P_e^PPT).
GapResult gap(const StatePair& pair, int n_copies, double tol = 0.0);

struct RateFit {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double residual_norm = 0.0;
  int n_lo = 0;
  int n_hi = 0;
  int points = 0;
};

/// Least squares of C(N) = -(1/N) log P_e on {1, log N / N, 1 / N} using the rows with
/// n_lo <= N <= n_hi. Throws DomainError for fewer than 3 usable rows and NumericalError
/// for a rank-deficient design.
RateFit fit_rate(const std::vector<std::pair<int, double>>& rows, int n_lo, int n_hi);

struct CopiesRatio {
  double f = 1.0;
  double rate_collective = 0.0;
  double rate_ppt = 0.0;
  std::string ppt_status = "converged";
};

/// f = C^col / C^PPT at N. Throws DomainError when P_e^PPT = 1/2 (zero rate).
CopiesRatio copies_ratio(const StatePair& pair, int n_copies, double tol = 0.0);

/// Shortest decimal that reads back to the same double ("nan", "inf", "-inf" otherwise).
std::string format_double(double value);

void write_csv(std::ostream& out, const SweepTable& table);
void write_json(std::ostream& out, const SweepTable& table);

struct VerificationCheck {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

/// Block machinery against dense 2^N reference computations for N <= max_copies on
/// `pairs` pseudo-random pairs drawn from `seed`.
std::vector<VerificationCheck> run_dense_verification(int max_copies = 6, int pairs = 50,
                                                      std::uint64_t seed = 1);

const char* library_version();

}  // namespace mixdisc
