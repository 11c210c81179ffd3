// mixdisc: error probabilities for N copies of two qubit mixed states.
//
// Every subcommand prints to stdout (or --out). Failures print a JSON object on stderr
// and exit nonzero.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixdisc/adaptive.hpp"
#include "mixdisc/errors.hpp"
#include "mixdisc/helstrom.hpp"
#include "mixdisc/local.hpp"
#include "mixdisc/parallel.hpp"
#include "mixdisc/qubit.hpp"
#include "mixdisc/runner.hpp"
#include "mixdisc/sdp.hpp"

using nlohmann::json;
using namespace mixdisc;

namespace {

struct Options {
  double r0 = 0.8;
  double r1 = 0.8;
  double theta = std::numbers::pi / 2;
  int n = 1;
  int n_min = 1;
  int n_max = 0;  // 0: same as n
  std::vector<double> r_values;
  std::vector<std::string> strategies;
  int grid = kDefaultPriorGridPoints;
  int angles = kAngleGridPoints;
  double tol = 0.0;
  std::uint64_t seed = 0;
  long trials = 0;
  std::string out;
  std::string format = "csv";
  bool allow_large = false;
  int workers = 0;
  std::string csv_in;
  int fit_lo = 25;
  int fit_hi = 35;
  std::string policy_out;
};

int workers_of(const Options& o) { return o.workers > 0 ? o.workers : default_workers(); }

int upper_n(const Options& o) { return o.n_max > 0 ? o.n_max : o.n; }

void check_copies(const Options& o, int n) {
  if (n < 1) throw DomainError("--n must be >= 1");
  if (!o.allow_large && n > kMaxSweepCopies)
    throw DomainError("N = " + std::to_string(n) + " exceeds " +
                      std::to_string(kMaxSweepCopies) + " (pass --allow-large to override)");
}

StatePair pair_of(const Options& o) { return make_state_pair(o.r0, o.r1, o.theta); }

// Writes to --out when given, stdout otherwise.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + o.out + "' for writing");
  f << text;
}

void emit_json(const Options& o, const json& j) { emit(o, j.dump(2) + "\n"); }

json pair_json(const Options& o) {
  return {{"r0", o.r0}, {"r1", o.r1}, {"theta", o.theta}};
}

SweepSpec sweep_spec(const Options& o) {
  SweepSpec s;
  s.r0 = o.r0;
  s.r1 = o.r1;
  s.theta = o.theta;
  s.r_values = o.r_values;
  s.n_min = o.n_min;
  s.n_max = upper_n(o);
  if (!o.strategies.empty()) {
    s.strategies.clear();
    for (const auto& name : o.strategies) s.strategies.push_back(parse_strategy(name));
  }
  s.tol = o.tol;
  s.grid_points = o.grid;
  s.angle_points = o.angles;
  s.seed = o.seed;
  s.allow_large = o.allow_large;
  s.workers = o.workers;
  return s;
}

void emit_table(const Options& o, const SweepTable& table) {
  std::ostringstream ss;
  if (parse_format(o.format) == OutputFormat::Json)
    write_json(ss, table);
  else
    write_csv(ss, table);
  emit(o, ss.str());
}

// Reads (N, P_e) pairs for one column of a sweep-n CSV.
std::vector<std::pair<int, double>> read_column(const std::string& path,
                                                const std::string& column) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DomainError("'" + path + "' is empty");
  const auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    return out;
  };
  const auto header = split(line);
  int n_col = -1, v_col = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    if (header[i] == "n") n_col = i;
    if (header[i] == column) v_col = i;
  }
  if (n_col < 0 || v_col < 0) throw DomainError("'" + path + "' has no n/" + column + " columns");
  std::vector<std::pair<int, double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (static_cast<int>(f.size()) <= std::max(n_col, v_col))
      throw DomainError("short row in '" + path + "'");
    rows.emplace_back(std::stoi(f[n_col]), std::stod(f[v_col]));
  }
  return rows;
}

int run(int argc, char** argv) {
  CLI::App app{"Finite-copy discrimination of two qubit mixed states"};
  app.set_version_flag("--version", std::string(library_version()));
  app.require_subcommand(1);
  Options o;

  const auto add_pair = [&o](CLI::App* c) {
    c->add_option("--r0", o.r0, "Bloch radius of rho_0")->capture_default_str();
    c->add_option("--r1", o.r1, "Bloch radius of rho_1")->capture_default_str();
    c->add_option("--theta", o.theta, "Angle between the Bloch vectors")->capture_default_str();
  };
  const auto add_common = [&o](CLI::App* c) {
    c->add_option("--out", o.out, "Output file (default stdout)");
    c->add_flag("--allow-large", o.allow_large, "Permit N above the resource limit");
  };
  const auto add_n = [&o](CLI::App* c) {
    c->add_option("--n", o.n, "Number of copies")->capture_default_str();
  };

  auto* collective = app.add_subcommand("collective", "Helstrom error for N copies");
  add_pair(collective);
  add_n(collective);
  add_common(collective);

  auto* ppt = app.add_subcommand("ppt", "PPT lower bound for N copies");
  add_pair(ppt);
  add_n(ppt);
  add_common(ppt);
  ppt->add_option("--tol", o.tol, "Duality-gap tolerance (0: default for N)");

  auto* repeated = app.add_subcommand("repeated", "Best repeated local measurement");
  add_pair(repeated);
  add_n(repeated);
  add_common(repeated);

  auto* adaptive = app.add_subcommand("adaptive", "Adaptive local measurement by DP");
  add_pair(adaptive);
  add_n(adaptive);
  add_common(adaptive);
  adaptive->add_option("--grid", o.grid, "Prior grid points")->capture_default_str();
  adaptive->add_option("--angles", o.angles, "Coarse angle search points")->capture_default_str();
  adaptive->add_option("--trials", o.trials, "Monte Carlo trials of the policy (0: none)");
  adaptive->add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
  adaptive->add_option("--policy-out", o.policy_out, "Write the policy table here");
  adaptive->add_option("--workers", o.workers, "Worker threads (0: environment/default)");

  auto* sweep_n_cmd = app.add_subcommand("sweep-n", "Table of P_e against N");
  add_pair(sweep_n_cmd);
  add_common(sweep_n_cmd);
  sweep_n_cmd->add_option("--n-min", o.n_min, "Smallest N")->capture_default_str();
  sweep_n_cmd->add_option("--n-max,--n", o.n_max, "Largest N")->required();
  sweep_n_cmd->add_option("--strategy", o.strategies,
                          "collective, ppt, repeated, adaptive (default all)")
      ->delimiter(',');
  sweep_n_cmd->add_option("--grid", o.grid, "Prior grid points")->capture_default_str();
  sweep_n_cmd->add_option("--tol", o.tol, "PPT tolerance (0: per-N default)");
  sweep_n_cmd->add_option("--seed", o.seed, "Seed (echoed in metadata)");
  sweep_n_cmd->add_option("--format", o.format, "csv or json")->capture_default_str();
  sweep_n_cmd->add_option("--workers", o.workers, "Worker threads (0: environment/default)");

  auto* sweep_r_cmd = app.add_subcommand("sweep-r", "Error rates against r = r0 = r1");
  sweep_r_cmd->add_option("--theta", o.theta, "Angle between the Bloch vectors")
      ->capture_default_str();
  add_n(sweep_r_cmd);
  add_common(sweep_r_cmd);
  sweep_r_cmd->add_option("--r", o.r_values, "Purities")->required()->delimiter(',');
  sweep_r_cmd->add_option("--strategy", o.strategies, "Strategies (default all)")->delimiter(',');
  sweep_r_cmd->add_option("--grid", o.grid, "Prior grid points")->capture_default_str();
  sweep_r_cmd->add_option("--tol", o.tol, "PPT tolerance (0: per-N default)");
  sweep_r_cmd->add_option("--seed", o.seed, "Seed (echoed in metadata)");
  sweep_r_cmd->add_option("--format", o.format, "csv or json")->capture_default_str();
  sweep_r_cmd->add_option("--workers", o.workers, "Worker threads (0: environment/default)");

  auto* gap_cmd = app.add_subcommand("gap", "Collective/PPT rate gap");
  add_pair(gap_cmd);
  add_n(gap_cmd);
  add_common(gap_cmd);
  gap_cmd->add_option("--tol", o.tol, "PPT tolerance (0: per-N default)");

  auto* fit_cmd = app.add_subcommand("fit", "Fit C0 + C1 log N/N + C2/N to a sweep-n CSV column");
  fit_cmd->add_option("--in", o.csv_in, "CSV written by sweep-n")->required();
  fit_cmd->add_option("--strategy", o.strategies, "Column to fit")->required()->expected(1);
  fit_cmd->add_option("--n-lo", o.fit_lo, "Window start")->capture_default_str();
  fit_cmd->add_option("--n-hi", o.fit_hi, "Window end")->capture_default_str();
  fit_cmd->add_option("--out", o.out, "Output file (default stdout)");

  auto* ratio_cmd = app.add_subcommand("ratio", "Copies ratio f = C_col / C_ppt");
  add_pair(ratio_cmd);
  add_n(ratio_cmd);
  add_common(ratio_cmd);
  ratio_cmd->add_option("--tol", o.tol, "PPT tolerance (0: per-N default)");

  auto* verify_cmd = app.add_subcommand("verify", "Block machinery against dense references");
  int verify_n = 6, verify_pairs = 50;
  verify_cmd->add_option("--n-max,--n", verify_n, "Largest N")->capture_default_str();
  verify_cmd->add_option("--pairs", verify_pairs, "Random pairs per N")->capture_default_str();
  verify_cmd->add_option("--seed", o.seed, "Seed")->capture_default_str();
  verify_cmd->add_option("--out", o.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }

  if (*collective) {
    check_copies(o, o.n);
    const double pe = collective_error(pair_of(o), o.n);
    emit_json(o, {{"strategy", "collective"}, {"pair", pair_json(o)}, {"n", o.n}, {"error", pe}});
  } else if (*ppt) {
    check_copies(o, o.n);
    const PptResult r = ppt_error(pair_of(o), o.n, o.tol);
    emit_json(o, {{"strategy", "ppt"},
                  {"pair", pair_json(o)},
                  {"n", o.n},
                  {"error", r.error},
                  {"status", to_string(r.solution.status)},
                  {"gap", r.solution.gap},
                  {"iterations", r.solution.iterations}});
  } else if (*repeated) {
    const RepeatedOptimum r = repeated_error_opt(pair_of(o), o.n);
    emit_json(o, {{"strategy", "repeated"},
                  {"pair", pair_json(o)},
                  {"n", o.n},
                  {"error", r.error},
                  {"theta_star", r.theta_star}});
  } else if (*adaptive) {
    check_copies(o, o.n);
    const StatePair pair = pair_of(o);
    AngleSearch search;
    search.coarse_points = o.angles;
    const DpResult dp = dp_solve(pair, o.n, PriorGrid(o.grid), search, workers_of(o));
    json j = {{"strategy", "adaptive"},
              {"pair", pair_json(o)},
              {"n", o.n},
              {"grid", o.grid},
              {"error", dp.error},
              {"error_by_copies", dp.error_by_copies},
              {"status", dp.status == DpStatus::Ok ? "ok" : "non-monotone"}};
    if (o.trials > 0) {
      json mc = json::array();
      for (int which = 0; which < 2; ++which) {
        const SimulationResult s = simulate(dp, pair, which, o.trials, o.seed, workers_of(o));
        mc.push_back({{"true_state", which},
                      {"trials", s.trials},
                      {"success_rate", s.success_rate},
                      {"std_error", s.std_error}});
      }
      j["monte_carlo"] = mc;
    }
    if (!o.policy_out.empty()) {
      std::ofstream f(o.policy_out);
      if (!f) throw std::runtime_error("cannot open '" + o.policy_out + "' for writing");
      write_policy_table(f, dp);
    }
    emit_json(o, j);
  } else if (*sweep_n_cmd) {
    emit_table(o, sweep_n(sweep_spec(o)));
  } else if (*sweep_r_cmd) {
    SweepSpec s = sweep_spec(o);
    s.n_min = s.n_max = o.n;
    emit_table(o, sweep_r(s));
  } else if (*gap_cmd) {
    check_copies(o, o.n);
    const GapResult g = gap(pair_of(o), o.n, o.tol);
    emit_json(o, {{"pair", pair_json(o)},
                  {"n", o.n},
                  {"delta", g.delta},
                  {"collective", g.collective},
                  {"ppt", g.ppt},
                  {"ppt_status", g.ppt_status},
                  {"clamped", g.clamped},
                  {"violation", g.violation}});
  } else if (*fit_cmd) {
    const auto rows = read_column(o.csv_in, o.strategies.front());
    const RateFit f = fit_rate(rows, o.fit_lo, o.fit_hi);
    emit_json(o, {{"column", o.strategies.front()},
                  {"c0", f.c0},
                  {"c1", f.c1},
                  {"c2", f.c2},
                  {"residual_norm", f.residual_norm},
                  {"n_lo", f.n_lo},
                  {"n_hi", f.n_hi},
                  {"points", f.points}});
  } else if (*ratio_cmd) {
    check_copies(o, o.n);
    const CopiesRatio r = copies_ratio(pair_of(o), o.n, o.tol);
    emit_json(o, {{"pair", pair_json(o)},
                  {"n", o.n},
                  {"f", r.f},
                  {"rate_collective", r.rate_collective},
                  {"rate_ppt", r.rate_ppt},
                  {"ppt_status", r.ppt_status}});
  } else if (*verify_cmd) {
    const auto checks = run_dense_verification(verify_n, verify_pairs, o.seed);
    json arr = json::array();
    bool ok = true;
    for (const auto& c : checks) {
      arr.push_back({{"name", c.name},
                     {"max_error", c.max_error},
                     {"tolerance", c.tolerance},
                     {"passed", c.passed}});
      ok = ok && c.passed;
    }
    emit_json(o, {{"checks", arr}, {"passed", ok}});
    return ok ? 0 : 1;
  }
  return 0;
}

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const ResourceError*>(&e)) return "resource";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical";
  return "runtime";
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", error_kind(e)}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
}
