#include "mixdisc/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "mixdisc/errors.hpp"
#include "mixdisc/local.hpp"
#include "mixdisc/numeric.hpp"
#include "mixdisc/parallel.hpp"

namespace mixdisc {
namespace {

using std::numbers::pi;

constexpr double kMonotoneSlack = 1e-12;
constexpr double kMaxExactWork = 1e8;

// p("+"|0), p("+"|1) at an angle, without building a Measurement1D.
struct Likelihoods {
  double p0;
  double p1;
};

Likelihoods likelihoods(const StatePair& pair, double theta_meas) {
  return {0.5 * (1.0 + pair.r0 * std::cos(theta_meas - pair.theta / 2)),
          0.5 * (1.0 + pair.r1 * std::cos(theta_meas + pair.theta / 2))};
}

// Expected next-stage value for a two-outcome measurement at prior pi0.
template <class Value>
double expected_value(double pi0, Likelihoods l, const Value& next) {
  double total = 0.0;
  const double plus = pi0 * l.p0 + (1.0 - pi0) * l.p1;
  if (plus > 0.0) total += plus * next(pi0 * l.p0 / plus);
  const double minus = pi0 * (1.0 - l.p0) + (1.0 - pi0) * (1.0 - l.p1);
  if (minus > 0.0) total += minus * next(pi0 * (1.0 - l.p0) / minus);
  return total;
}

struct StageOptimum {
  double value;
  double angle;
};

// max over the measurement angle of the expected next-stage value at prior pi0.
template <class Value>
StageOptimum best_angle(double pi0, const StatePair& pair, const AngleSearch& search,
                        const std::vector<double>& angles,
                        const std::vector<Likelihoods>& coarse, const Value& next) {
  int best = 0;
  double best_value = -1.0;
  for (std::size_t a = 0; a < coarse.size(); ++a) {
    const double v = expected_value(pi0, coarse[a], next);
    if (v > best_value) {
      best_value = v;
      best = static_cast<int>(a);
    }
  }
  StageOptimum out{best_value, angles[best]};
  if (!search.refine || angles.size() < 2) return out;
  const double lo = angles[std::max(best - 1, 0)];
  const double hi = angles[std::min<std::size_t>(best + 1, angles.size() - 1)];
  const ScalarMin m = golden_section_min(
      [&](double t) { return -expected_value(pi0, likelihoods(pair, t), next); }, lo, hi,
      search.refine_tol);
  if (-m.value > out.value) out = {-m.value, m.x};
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream: value k of trial t depends only on (seed, t, k).
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t trial)
      : key_(splitmix64(seed ^ splitmix64(trial + 0x632be59bd9b4e019ULL))) {}
  double uniform() { return (splitmix64(key_ + counter_++) >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Index of the better of the two supporting lines bracketing `prior` at stage n.
int table_line(const ValueTable& table, int n, double prior) {
  const int g = static_cast<int>(table.given_0[n].size());
  const double t = std::clamp(prior, 0.0, 1.0) * (g - 1);
  const int i = std::min(static_cast<int>(t), g - 2);
  const auto line = [&](int k) {
    return prior * table.given_0[n][k] + (1.0 - prior) * table.given_1[n][k];
  };
  return line(i + 1) > line(i) ? i + 1 : i;
}

void check_copies(int n_copies) {
  if (n_copies < 1) throw DomainError("n_copies must be >= 1");
}

double exact_recursion(const StatePair& pair, int remaining, double prior,
                       const std::vector<Likelihoods>& coarse) {
  if (remaining == 0) return std::max(prior, 1.0 - prior);
  double best = -1.0;
  const auto next = [&](double posterior) {
    return exact_recursion(pair, remaining - 1, posterior, coarse);
  };
  for (const Likelihoods& l : coarse) best = std::max(best, expected_value(prior, l, next));
  return best;
}

// Unnormalized weights w_a = pi_a * prod_k p(chi_k | a, theta_k); no Bayes normalization.
double joint_recursion(int remaining, double w0, double w1,
                       const std::vector<Likelihoods>& coarse) {
  if (remaining == 0) return std::max(w0, w1);
  double best = -1.0;
  for (const Likelihoods& l : coarse) {
    const double v = joint_recursion(remaining - 1, w0 * l.p0, w1 * l.p1, coarse) +
                     joint_recursion(remaining - 1, w0 * (1.0 - l.p0), w1 * (1.0 - l.p1), coarse);
    best = std::max(best, v);
  }
  return best;
}

std::vector<Likelihoods> tabulate(const StatePair& pair, std::span<const double> angles) {
  std::vector<Likelihoods> out;
  out.reserve(angles.size());
  for (double a : angles) out.push_back(likelihoods(pair, a));
  return out;
}

void check_exact_work(std::size_t angles, int n_copies) {
  if (angles == 0) throw DomainError("angle grid must be non-empty");
  const double work = std::pow(2.0 * static_cast<double>(angles), n_copies);
  if (work > kMaxExactWork) throw ResourceError("exhaustive adaptive evaluation too large");
}

}  // namespace

PriorGrid::PriorGrid(int points) : points_(points) {
  if (points < 2) throw DomainError("prior grid needs at least 2 points");
}

int PriorGrid::nearest(double prior) const {
  const long i = std::lround(std::clamp(prior, 0.0, 1.0) * (points_ - 1));
  return static_cast<int>(i);
}

int PriorGrid::cell(double prior) const {
  const double t = std::clamp(prior, 0.0, 1.0) * (points_ - 1);
  return std::min(static_cast<int>(t), points_ - 2);
}

double PriorGrid::interpolate(std::span<const double> values, double prior) const {
  const int i = cell(prior);
  const double frac = std::clamp(prior, 0.0, 1.0) * (points_ - 1) - i;
  return values[i] + frac * (values[i + 1] - values[i]);
}

double ValueTable::evaluate(int n, double prior) const {
  const int j = table_line(*this, n, prior);
  return prior * given_0[n][j] + (1.0 - prior) * given_1[n][j];
}

std::vector<double> AngleSearch::coarse_angles() const {
  if (coarse_points < 1) throw DomainError("coarse_points must be >= 1");
  if (coarse_points == 1) return {pi / 2};
  std::vector<double> out(coarse_points);
  for (int i = 0; i < coarse_points; ++i) out[i] = pi * i / (coarse_points - 1);
  return out;
}

double bayes_update(double prior, double like0, double like1) {
  if (!(prior >= 0.0 && prior <= 1.0)) throw DomainError("prior must lie in [0, 1]");
  const double marginal = like0 * prior + like1 * (1.0 - prior);
  if (!(marginal > 0.0)) throw DomainError("outcome has zero probability");
  return std::clamp(like0 * prior / marginal, 0.0, 1.0);
}

double bayes_update(double prior, int outcome, double theta_meas, const StatePair& pair) {
  if (outcome != 0 && outcome != 1) throw DomainError("outcome must be 0 or 1");
  const Likelihoods l = likelihoods(pair, theta_meas);
  if (outcome == 0) return bayes_update(prior, l.p0, l.p1);
  return bayes_update(prior, 1.0 - l.p0, 1.0 - l.p1);
}

DpResult dp_solve(const StatePair& pair, int n_copies, const PriorGrid& grid,
                  const AngleSearch& search, int workers) {
  check_copies(n_copies);
  const int g = grid.size();
  const std::vector<double> angles = search.coarse_angles();
  const std::vector<Likelihoods> coarse = tabulate(pair, angles);

  DpResult out;
  out.n_copies = n_copies;
  out.grid = grid;
  ValueTable& table = out.values;
  table.stages.assign(n_copies + 1, std::vector<double>(g));
  table.given_0.assign(n_copies + 1, std::vector<double>(g));
  table.given_1.assign(n_copies + 1, std::vector<double>(g));
  out.policy.angles.assign(n_copies, std::vector<double>(g, pi / 2));
  for (int i = 0; i < g; ++i) {
    const double p = grid.node(i);
    const bool guess_0 = p >= 0.5;
    table.given_0[n_copies][i] = guess_0 ? 1.0 : 0.0;
    table.given_1[n_copies][i] = guess_0 ? 0.0 : 1.0;
    table.stages[n_copies][i] = std::max(p, 1.0 - p);
  }

  const bool mirror = pair.equal_purities();
  for (int n = n_copies - 1; n >= 0; --n) {
    const auto next = [&](double p) { return table.evaluate(n + 1, p); };
    std::vector<double>& g0 = table.given_0[n];
    std::vector<double>& g1 = table.given_1[n];
    std::vector<double>& policy = out.policy.angles[n];
    // Equal purities: the problem is invariant under pi -> 1 - pi with the hypotheses
    // swapped and theta -> pi - theta, so only the lower half of the lattice is solved.
    const int solved = mirror ? (g + 1) / 2 : g;
    parallel_for(static_cast<std::size_t>(solved), workers, [&](std::size_t i) {
      const double p = grid.node(static_cast<int>(i));
      const StageOptimum o = best_angle(p, pair, search, angles, coarse, next);
      policy[i] = o.angle;
      // Conditional successes of the chosen strategy: follow each outcome into the
      // supporting line that the next stage uses at the posterior.
      const Likelihoods l = likelihoods(pair, o.angle);
      double s0 = 0.0, s1 = 0.0;
      const double outcome0[2] = {l.p0, 1.0 - l.p0};
      const double outcome1[2] = {l.p1, 1.0 - l.p1};
      for (int c = 0; c < 2; ++c) {
        const double marginal = p * outcome0[c] + (1.0 - p) * outcome1[c];
        // A zero-probability outcome still needs a line; its posterior is irrelevant to
        // the value at p but the line must stay a valid strategy for other priors.
        const double post = marginal > 0.0 ? p * outcome0[c] / marginal : p;
        const int j = table_line(table, n + 1, post);
        s0 += outcome0[c] * table.given_0[n + 1][j];
        s1 += outcome1[c] * table.given_1[n + 1][j];
      }
      g0[i] = std::min(s0, 1.0);
      g1[i] = std::min(s1, 1.0);
    });
    if (mirror) {
      for (int i = solved; i < g; ++i) {
        g0[i] = g1[g - 1 - i];
        g1[i] = g0[g - 1 - i];
        policy[i] = pi - policy[g - 1 - i];
      }
    }
    // A neighbour's strategy can beat a node's own (the angle search is local); adopt it.
    // Simultaneous passes keep the update mirror-symmetric for mirror-symmetric problems.
    for (bool changed = true; changed;) {
      changed = false;
      const std::vector<double> old0 = g0, old1 = g1, old_policy = policy;
      for (int i = 0; i < g; ++i) {
        const double p = grid.node(i);
        double best = p * old0[i] + (1.0 - p) * old1[i];
        for (int from : {i - 1, i + 1}) {
          if (from < 0 || from >= g) continue;
          const double theirs = p * old0[from] + (1.0 - p) * old1[from];
          if (theirs > best) {
            best = theirs;
            g0[i] = old0[from];
            g1[i] = old1[from];
            policy[i] = old_policy[from];
            changed = true;
          }
        }
      }
    }
    for (int i = 0; i < g; ++i) {
      const double p = grid.node(i);
      table.stages[n][i] = p * g0[i] + (1.0 - p) * g1[i];
      if (table.stages[n][i] < table.stages[n + 1][i] - kMonotoneSlack)
        out.status = DpStatus::NonMonotone;
    }
  }

  // 1/2 is not a node when g is even, so the first decision is re-optimized at 1/2 exactly.
  out.error_by_copies.assign(n_copies + 1, 0.5);
  for (int k = 1; k <= n_copies; ++k) {
    const int stage = n_copies - k + 1;
    const auto next = [&](double p) { return table.evaluate(stage, p); };
    const StageOptimum o = best_angle(0.5, pair, search, angles, coarse, next);
    out.error_by_copies[k] = std::clamp(1.0 - o.value, 0.0, 0.5);
  }
  out.error = out.error_by_copies[n_copies];
  return out;
}

AdaptiveValue dp_exact(const StatePair& pair, int n_copies, double prior,
                       std::span<const double> angles) {
  if (n_copies < 0) throw DomainError("n_copies must be >= 0");
  check_exact_work(angles.size(), n_copies);
  const double s = exact_recursion(pair, n_copies, prior, tabulate(pair, angles));
  return {s, 1.0 - s};
}

AdaptiveValue brute_force_adaptive(const StatePair& pair, int n_copies,
                                   std::span<const double> angles, double prior) {
  if (n_copies < 1 || n_copies > 3) throw DomainError("brute_force_adaptive needs 1 <= N <= 3");
  if (!(prior >= 0.0 && prior <= 1.0)) throw DomainError("prior must lie in [0, 1]");
  check_exact_work(angles.size(), n_copies);
  const double s = joint_recursion(n_copies, prior, 1.0 - prior, tabulate(pair, angles));
  return {s, 1.0 - s};
}

SimulationResult simulate(const DpResult& dp, const StatePair& pair, int which_true,
                          std::uint64_t trials, std::uint64_t seed, int workers) {
  if (which_true != 0 && which_true != 1) throw DomainError("which_true must be 0 or 1");
  if (trials < 1) throw DomainError("trials must be >= 1");
  if (static_cast<int>(dp.policy.angles.size()) != dp.n_copies)
    throw DomainError("policy does not match the copy count");

  // Trials are split into fixed blocks so the tally is independent of the worker count.
  constexpr std::uint64_t kBlock = 4096;
  const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<std::uint64_t> wins(blocks, 0);
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::uint64_t begin = b * kBlock;
    const std::uint64_t end = std::min(trials, begin + kBlock);
    std::uint64_t count = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
      TrialStream rng(seed, t);
      double prior = 0.5;
      for (int n = 0; n < dp.n_copies; ++n) {
        const double angle = dp.policy.angles[n][dp.grid.nearest(prior)];
        const Likelihoods l = likelihoods(pair, angle);
        const double p_plus = which_true == 0 ? l.p0 : l.p1;
        const bool plus = rng.uniform() < p_plus;
        const double like0 = plus ? l.p0 : 1.0 - l.p0;
        const double like1 = plus ? l.p1 : 1.0 - l.p1;
        prior = bayes_update(prior, like0, like1);
      }
      int guess;
      if (prior > 0.5) guess = 0;
      else if (prior < 0.5) guess = 1;
      else guess = rng.uniform() < 0.5 ? 0 : 1;
      if (guess == which_true) ++count;
    }
    wins[b] = count;
  });

  SimulationResult out;
  out.trials = trials;
  for (std::uint64_t w : wins) out.successes += w;
  out.success_rate = static_cast<double>(out.successes) / static_cast<double>(trials);
  out.std_error =
      std::sqrt(out.success_rate * (1.0 - out.success_rate) / static_cast<double>(trials));
  return out;
}

void write_policy_table(std::ostream& out, const DpResult& dp) {
  const int g = dp.grid.size();
  out << "# mixdisc adaptive table\n";
  out << "# copies " << dp.n_copies << " grid " << g << "\n";
  out << "# stage prior value angle\n";
  out.precision(17);
  for (int n = 0; n <= dp.n_copies; ++n) {
    for (int i = 0; i < g; ++i) {
      const double angle = n < dp.n_copies ? dp.policy.angles[n][i]
                                           : std::numeric_limits<double>::quiet_NaN();
      out << n << ' ' << dp.grid.node(i) << ' ' << dp.values.stages[n][i] << ' ' << angle
          << '\n';
    }
  }
}

PolicyTableData read_policy_table(std::istream& in) {
  PolicyTableData data;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string word;
      hs >> word;
      if (word == "copies") {
        std::string grid_word;
        if (!(hs >> data.n_copies >> grid_word >> data.grid_points) || grid_word != "grid")
          throw DomainError("malformed table header");
        if (data.n_copies < 1 || data.grid_points < 2) throw DomainError("bad table header");
        data.values.stages.assign(data.n_copies + 1, std::vector<double>(data.grid_points));
        data.policy.angles.assign(data.n_copies, std::vector<double>(data.grid_points));
        have_header = true;
      }
      continue;
    }
    if (!have_header) throw DomainError("table rows before header");
    std::istringstream row(line);
    int n;
    double prior, value;
    std::string angle_text;
    if (!(row >> n >> prior >> value >> angle_text)) throw DomainError("malformed table row");
    if (n < 0 || n > data.n_copies) throw DomainError("stage out of range");
    const long i = std::lround(prior * (data.grid_points - 1));
    if (i < 0 || i >= data.grid_points) throw DomainError("prior out of range");
    data.values.stages[n][i] = value;
    if (n < data.n_copies) data.policy.angles[n][i] = std::stod(angle_text);
  }
  if (!have_header) throw DomainError("missing table header");
  return data;
}

}  // namespace mixdisc
