#include "mixdisc/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include <Eigen/Dense>
#include <json.hpp>

#include "mixdisc/adaptive.hpp"
#include "mixdisc/blocks.hpp"
#include "mixdisc/errors.hpp"
#include "mixdisc/helstrom.hpp"
#include "mixdisc/local.hpp"
#include "mixdisc/parallel.hpp"
#include "mixdisc/sdp.hpp"

#ifndef MIXDISC_VERSION
#define MIXDISC_VERSION "unknown"
#endif

namespace mixdisc {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string ppt_status_text(SolverStatus s) {
  return s == SolverStatus::Converged ? "ok" : to_string(s);
}

// Appends the tasks filling out[k] (the cell for N = n_lo + k) for one strategy. Each task
// writes only its own cells; pair, spec and out must outlive the tasks.
void add_strategy_tasks(std::vector<std::function<void()>>& tasks, Strategy s,
                        const StatePair& pair, const SweepSpec& spec, int n_lo, int n_hi,
                        std::vector<Cell>& out) {
  using CellFn = std::function<Cell(int)>;
  const auto per_n = [&](CellFn f) {
    for (int n = n_lo; n <= n_hi; ++n)
      tasks.push_back([&out, f, n, n_lo] {
        try {
          out[n - n_lo] = f(n);
        } catch (const std::exception& e) {
          out[n - n_lo] = {kNaN, std::string("error: ") + e.what()};
        }
      });
  };
  switch (s) {
    case Strategy::Collective:
      per_n([&pair](int n) { return Cell{collective_error(pair, n), "ok"}; });
      return;
    case Strategy::Repeated:
      per_n([&pair](int n) { return Cell{repeated_error_opt(pair, n).error, "ok"}; });
      return;
    case Strategy::Ppt:
      per_n([&pair, tol = spec.tol](int n) {
        const PptResult r = ppt_error(pair, n, tol);
        return Cell{r.error, ppt_status_text(r.solution.status)};
      });
      return;
    case Strategy::Adaptive:
      // One backward pass at the largest N yields every smaller N.
      tasks.push_back([&out, &pair, &spec, n_lo, n_hi] {
        try {
          AngleSearch search;
          search.coarse_points = spec.angle_points;
          const DpResult dp = dp_solve(pair, n_hi, PriorGrid(spec.grid_points), search, 1);
          const std::string status = dp.status == DpStatus::Ok ? "ok" : "non-monotone";
          for (int n = n_lo; n <= n_hi; ++n) out[n - n_lo] = {dp.error_by_copies[n], status};
        } catch (const std::exception& e) {
          for (int n = n_lo; n <= n_hi; ++n)
            out[n - n_lo] = {kNaN, std::string("error: ") + e.what()};
        }
      });
      return;
  }
}

// Position of each strategy in collective <= ppt <= adaptive <= repeated.
int ordering_rank(Strategy s) {
  switch (s) {
    case Strategy::Collective: return 0;
    case Strategy::Ppt: return 1;
    case Strategy::Adaptive: return 2;
    case Strategy::Repeated: return 3;
  }
  return 0;
}

bool row_ordered(const std::vector<Strategy>& strategies, const std::vector<Cell>& errors,
                 double tol) {
  std::vector<std::pair<int, double>> ranked;
  for (std::size_t i = 0; i < strategies.size(); ++i)
    if (std::isfinite(errors[i].value)) ranked.emplace_back(ordering_rank(strategies[i]), errors[i].value);
  std::sort(ranked.begin(), ranked.end());
  for (std::size_t i = 1; i < ranked.size(); ++i)
    if (ranked[i - 1].second > ranked[i].second + tol) return false;
  return true;
}

int resolve_workers(const SweepSpec& spec) {
  return spec.workers > 0 ? spec.workers : default_workers();
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string column_name(Strategy s, SweepTable::Quantity q) {
  std::string name = to_string(s);
  if (q == SweepTable::Quantity::ErrorRate) name += "_rate";
  return name;
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Collective: return "collective";
    case Strategy::Ppt: return "ppt";
    case Strategy::Repeated: return "repeated";
    case Strategy::Adaptive: return "adaptive";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : all_strategies())
    if (name == to_string(s)) return s;
  throw DomainError("unknown strategy '" + std::string(name) +
                    "' (expected collective, ppt, repeated or adaptive)");
}

std::vector<Strategy> all_strategies() {
  return {Strategy::Collective, Strategy::Ppt, Strategy::Repeated, Strategy::Adaptive};
}

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw DomainError("unknown format '" + std::string(name) + "' (expected csv or json)");
}

void SweepSpec::validate() const {
  make_state_pair(r0, r1, theta);
  for (double r : r_values)
    if (!(r >= 0.0 && r < 1.0)) throw DomainError("r_values: entries must lie in [0, 1)");
  if (n_min < 1) throw DomainError("n_min must be >= 1");
  if (n_max < n_min) throw DomainError("n_max must be >= n_min");
  if (!allow_large && n_max > kMaxSweepCopies)
    throw DomainError("n_max = " + std::to_string(n_max) + " exceeds " +
                      std::to_string(kMaxSweepCopies) + " (set allow_large to override)");
  if (strategies.empty()) throw DomainError("strategies must be non-empty");
  if (grid_points < 2) throw DomainError("grid_points must be >= 2");
  if (angle_points < 1) throw DomainError("angle_points must be >= 1");
  if (tol > 0.0 && tol < 1e-10) throw DomainError("tol must be >= 1e-10");
  if (!(ordering_tol >= 0.0)) throw DomainError("ordering_tol must be >= 0");
}

SweepTable sweep_n(const SweepSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const StatePair pair = make_state_pair(spec.r0, spec.r1, spec.theta);
  const int count = spec.n_max - spec.n_min + 1;

  std::vector<std::vector<Cell>> columns(spec.strategies.size(), std::vector<Cell>(count));
  std::vector<std::function<void()>> tasks;
  for (std::size_t s = 0; s < spec.strategies.size(); ++s)
    add_strategy_tasks(tasks, spec.strategies[s], pair, spec, spec.n_min, spec.n_max,
                       columns[s]);
  parallel_for(tasks.size(), resolve_workers(spec), [&](std::size_t i) { tasks[i](); });

  SweepTable table;
  table.spec = spec;
  table.strategies = spec.strategies;
  for (int k = 0; k < count; ++k) {
    SweepRow row{spec.n_min + k, spec.r0, spec.r1, spec.theta, {}, true};
    for (auto& col : columns) row.cells.push_back(col[k]);
    row.ordered = row_ordered(table.strategies, row.cells, spec.ordering_tol);
    table.rows.push_back(std::move(row));
  }
  table.wall_seconds = elapsed(start);
  return table;
}

SweepTable sweep_r(const SweepSpec& spec) {
  spec.validate();
  if (spec.r_values.empty()) throw DomainError("r_values must be non-empty for sweep_r");
  const auto start = std::chrono::steady_clock::now();
  const int n = spec.n_max;
  const std::size_t rs = spec.r_values.size();

  std::vector<StatePair> pairs;
  for (double r : spec.r_values) pairs.push_back(make_state_pair(r, r, spec.theta));
  // cells[r][s] holds a one-element column for N = n.
  std::vector<std::vector<std::vector<Cell>>> cells(
      rs, std::vector<std::vector<Cell>>(spec.strategies.size(), std::vector<Cell>(1)));
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < rs; ++i)
    for (std::size_t s = 0; s < spec.strategies.size(); ++s)
      add_strategy_tasks(tasks, spec.strategies[s], pairs[i], spec, n, n, cells[i][s]);
  parallel_for(tasks.size(), resolve_workers(spec), [&](std::size_t i) { tasks[i](); });

  SweepTable table;
  table.quantity = SweepTable::Quantity::ErrorRate;
  table.spec = spec;
  table.strategies = spec.strategies;
  for (std::size_t i = 0; i < rs; ++i) {
    SweepRow row{n, spec.r_values[i], spec.r_values[i], spec.theta, {}, true};
    for (auto& col : cells[i]) row.cells.push_back(col[0]);
    row.ordered = row_ordered(table.strategies, row.cells, spec.ordering_tol);
    for (Cell& c : row.cells) c.value = -std::log(c.value) / n;
    table.rows.push_back(std::move(row));
  }
  table.wall_seconds = elapsed(start);
  return table;
}

GapResult gap(const StatePair& pair, int n_copies, double tol) {
  GapResult out;
  out.collective = collective_error(pair, n_copies);
  const PptResult ppt = ppt_error(pair, n_copies, tol);
  out.ppt = ppt.error;
  out.ppt_status = to_string(ppt.solution.status);
  out.delta = -std::log(out.collective / out.ppt) / n_copies;
  if (out.delta < 0.0) {
    // The solver value is within solution.gap of the optimum; P_e within half of that.
    const double slack = 0.5 * ppt.solution.gap / (out.ppt * n_copies) + 1e-12;
    if (-out.delta <= slack) {
      out.delta = 0.0;
      out.clamped = true;
    } else {
      out.violation = true;
    }
  }
  return out;
}

RateFit fit_rate(const std::vector<std::pair<int, double>>& rows, int n_lo, int n_hi) {
  std::vector<std::pair<int, double>> used;
  for (const auto& [n, pe] : rows)
    if (n >= n_lo && n <= n_hi) {
      if (n < 1 || !(pe > 0.0 && pe <= 0.5))
        throw DomainError("fit_rate: rows need N >= 1 and P_e in (0, 1/2]");
      used.emplace_back(n, pe);
    }
  if (used.size() < 3) throw DomainError("fit_rate: fewer than 3 rows in the window");

  const int m = static_cast<int>(used.size());
  Eigen::MatrixXd a(m, 3);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const double n = used[i].first;
    a(i, 0) = 1.0;
    a(i, 1) = std::log(n) / n;
    a(i, 2) = 1.0 / n;
    b[i] = -std::log(used[i].second) / n;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) throw NumericalError("fit_rate: singular design matrix");
  const Eigen::Vector3d x = qr.solve(b);

  RateFit fit;
  fit.c0 = x[0];
  fit.c1 = x[1];
  fit.c2 = x[2];
  fit.residual_norm = (a * x - b).norm();
  fit.n_lo = n_lo;
  fit.n_hi = n_hi;
  fit.points = m;
  return fit;
}

CopiesRatio copies_ratio(const StatePair& pair, int n_copies, double tol) {
  const PptResult ppt = ppt_error(pair, n_copies, tol);
  if (!(ppt.error < 0.5)) throw DomainError("copies_ratio: P_e^PPT = 1/2, rates are degenerate");
  CopiesRatio out;
  out.rate_collective = -std::log(collective_error(pair, n_copies)) / n_copies;
  out.rate_ppt = -std::log(ppt.error) / n_copies;
  out.f = out.rate_collective / out.rate_ppt;
  out.ppt_status = to_string(ppt.solution.status);
  return out;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const SweepTable& table) {
  out << "n,r0,r1,theta";
  for (Strategy s : table.strategies) {
    const std::string name = column_name(s, table.quantity);
    out << ',' << name << ',' << to_string(s) << "_status";
  }
  out << ",ordered\n";
  for (const SweepRow& row : table.rows) {
    out << row.n << ',' << format_double(row.r0) << ',' << format_double(row.r1) << ','
        << format_double(row.theta);
    for (const Cell& c : row.cells) out << ',' << format_double(c.value) << ',' << c.status;
    out << ',' << (row.ordered ? "true" : "false") << '\n';
  }
}

void write_json(std::ostream& out, const SweepTable& table) {
  using nlohmann::json;
  const SweepSpec& s = table.spec;
  json strategies = json::array();
  for (Strategy st : table.strategies) strategies.push_back(to_string(st));
  json meta = {
      {"tool", "mixdisc"},
      {"version", library_version()},
      {"quantity", table.quantity == SweepTable::Quantity::ErrorRate ? "error_rate"
                                                                       : "error_probability"},
      {"wall_seconds", table.wall_seconds},
      {"spec",
       {{"r0", s.r0},
        {"r1", s.r1},
        {"theta", s.theta},
        {"r_values", s.r_values},
        {"n_min", s.n_min},
        {"n_max", s.n_max},
        {"strategies", strategies},
        {"tol", s.tol},
        {"grid_points", s.grid_points},
        {"angle_points", s.angle_points},
        {"ordering_tol", s.ordering_tol},
        {"seed", s.seed}}},
  };
  json rows = json::array();
  for (const SweepRow& row : table.rows) {
    json r = {{"n", row.n}, {"r0", row.r0}, {"r1", row.r1}, {"theta", row.theta},
              {"ordered", row.ordered}};
    for (std::size_t i = 0; i < table.strategies.size(); ++i) {
      const Cell& c = row.cells[i];
      json value = std::isfinite(c.value) ? json(c.value) : json(nullptr);
      r[column_name(table.strategies[i], table.quantity)] = {{"value", value},
                                                             {"status", c.status}};
    }
    rows.push_back(std::move(r));
  }
  out << json{{"metadata", meta}, {"rows", rows}}.dump(2) << '\n';
}

std::vector<VerificationCheck> run_dense_verification(int max_copies, int pairs,
                                                      std::uint64_t seed) {
  if (max_copies < 1 || max_copies > kMaxDenseCopies)
    throw DomainError("max_copies must lie in [1, " + std::to_string(kMaxDenseCopies) + "]");
  if (pairs < 1) throw DomainError("pairs must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);

  VerificationCheck collective{"collective_error block vs dense", 0.0, 1e-10, true};
  VerificationCheck sigma{"sigma_block vs dense projection", 0.0, 1e-10, true};
  VerificationCheck assembled{"assemble_block vs dense projection", 0.0, 1e-10, true};
  VerificationCheck completeness{"sum_j n_j (2j+1) = 2^N", 0.0, 0.0, true};

  for (int n = 1; n <= max_copies; ++n) {
    std::uint64_t total = 0;
    for (int two_j : spin_range(n)) total += degeneracy(n, two_j) * (two_j + 1);
    completeness.max_error = std::max(
        completeness.max_error, std::fabs(static_cast<double>(total) - std::ldexp(1.0, n)));

    for (int k = 0; k < pairs; ++k) {
      const StatePair pair = make_state_pair(unit(rng), unit(rng), angle(rng));
      collective.max_error =
          std::max(collective.max_error,
                   std::fabs(collective_error(pair, n) - collective_error_dense(pair, n)));
      for (int which = 0; which < 2; ++which) {
        const Eigen::MatrixXd dense = sigma_dense(pair, which, n);
        for (int two_j : spin_range(n)) {
          const double err = (sigma_block(pair, which, n, two_j) -
                              project_to_block(dense, n, two_j)).cwiseAbs().maxCoeff();
          sigma.max_error = std::max(sigma.max_error, err);
        }
      }
      ParamVector params(n);
      for (double& v : params.values()) v = 2.0 * unit(rng) - 1.0;
      const Eigen::MatrixXd dense = reconstruct_dense(params);
      for (int two_j : spin_range(n)) {
        const double err = (assemble_block(params, two_j) -
                            project_to_block(dense, n, two_j)).cwiseAbs().maxCoeff();
        assembled.max_error = std::max(assembled.max_error, err);
      }
    }
  }
  std::vector<VerificationCheck> out{collective, sigma, assembled, completeness};
  for (auto& c : out) c.passed = c.max_error <= c.tolerance;
  return out;
}

const char* library_version() { return MIXDISC_VERSION; }

}  // namespace mixdisc
