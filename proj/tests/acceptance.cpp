// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mixdisc/adaptive.hpp"
#include "mixdisc/blocks.hpp"
#include "mixdisc/helstrom.hpp"
#include "mixdisc/local.hpp"
#include "mixdisc/qubit.hpp"
#include "mixdisc/runner.hpp"
#include "mixdisc/sdp.hpp"
#include "oracles.hpp"

using namespace mixdisc;
using std::numbers::pi;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

// Collects sub-checks; the first failure is kept in the detail line.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && passed_) first_failure_ = what;
    passed_ = passed_ && ok;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  Outcome done() const {
    return {passed_, passed_ ? notes_ : "failed: " + first_failure_ + (notes_.empty() ? "" : " | " + notes_)};
  }

 private:
  bool passed_ = true;
  std::string first_failure_;
  std::string notes_;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

const StatePair kRefPair = make_state_pair(0.8, 0.8, pi / 2);

Outcome single_copy() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  const double closed = (1 - 0.8 * std::sin(pi / 4)) / 2;
  const double values[] = {collective_error(kRefPair, 1), ppt_error(kRefPair, 1).error,
                           repeated_error_opt(kRefPair, 1).error, dp_solve(kRefPair, 1).error};
  const char* names[] = {"collective", "ppt", "repeated", "adaptive"};
  const double elapsed = seconds_since(t0);
  double worst = 0;
  for (int i = 0; i < 4; ++i) {
    worst = std::max(worst, std::fabs(values[i] - closed));
    c.expect(std::fabs(values[i] - 0.217157) <= 1e-6, std::string(names[i]) + fmt(" = %.9f", values[i]));
  }
  c.expect(elapsed < 1.0, fmt("runtime %.2f s", elapsed));
  c.note(fmt("max |P_e - closed form| = %.2e, %.2f s", worst, elapsed));
  return c.done();
}

Outcome dense_oracle() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& check : run_dense_verification(6, 50, 20240917)) {
    c.expect(check.passed, check.name + fmt(" max error %.2e", check.max_error));
    c.note(check.name + fmt(" %.1e", check.max_error));
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 120, fmt("runtime %.1f s", elapsed));
  return c.done();
}

Outcome block_algebra() {
  Checker c;
  for (int n = 1; n <= 40; ++n) {
    std::uint64_t total = 0;
    for (int two_j : spin_range(n)) total += static_cast<std::uint64_t>(degeneracy(n, two_j)) * (two_j + 1);
    c.expect(total == (std::uint64_t{1} << n), "dimension count at N=" + std::to_string(n));
  }
  double trace_err = 0;
  const StatePair pairs[] = {kRefPair, make_state_pair(0.3, 0.95, 2.2), make_state_pair(1.0, 0.5, 0.4)};
  for (const StatePair& pair : pairs)
    for (int n : {1, 2, 5, 12, 25, 40})
      for (int which = 0; which < 2; ++which) {
        long double tr = 0;
        for (int two_j : spin_range(n))
          tr += static_cast<long double>(degeneracy(n, two_j)) * sigma_block(pair, which, n, two_j).trace();
        trace_err = std::max(trace_err, static_cast<double>(std::fabs(tr - 1)));
      }
  c.expect(trace_err <= 1e-12, fmt("trace error %.2e", trace_err));
  double orth = 0, group = 0;
  for (int two_j = 0; two_j <= 12; ++two_j)
    for (double b1 : {0.3, 1.1, 2.9})
      for (double b2 : {-0.7, 0.5, 2.0}) {
        const Eigen::MatrixXd d1 = wigner_d(two_j, b1), d2 = wigner_d(two_j, b2);
        orth = std::max(orth, (d1.transpose() * d1 - Eigen::MatrixXd::Identity(two_j + 1, two_j + 1))
                                  .cwiseAbs().maxCoeff());
        group = std::max(group, (d1 * d2 - wigner_d(two_j, b1 + b2)).cwiseAbs().maxCoeff());
      }
  c.expect(orth <= 1e-10, fmt("Wigner orthogonality %.2e", orth));
  c.expect(group <= 1e-10, fmt("Wigner group law %.2e", group));
  c.note(fmt("trace err %.1e, Wigner orth %.1e", trace_err, orth) + fmt(", group %.1e", group));
  return c.done();
}

Outcome ppt_correctness() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  double n1 = 0;
  for (const StatePair& pair : {kRefPair, make_state_pair(0.4, 0.9, 1.2), make_state_pair(1.0, 0.6, 2.5)})
    n1 = std::max(n1, std::fabs(ppt_error(pair, 1, 1e-10).error - collective_error(pair, 1)));
  c.expect(n1 <= 1e-9, fmt("N=1 PPT vs Helstrom %.2e", n1));

  double n2 = 0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int k = 0; k < 5; ++k) {
    const double r0 = unit(rng), r1 = unit(rng), theta = pi * unit(rng);
    const oracle::DenseSdpResult ref = oracle::ppt_dense(r0, r1, theta, 2);
    c.expect(ref.residual < 1e-9, "dense oracle did not converge");
    n2 = std::max(n2, std::fabs(ppt_error(make_state_pair(r0, r1, theta), 2, 1e-10).error - ref.error));
  }
  c.expect(n2 <= 1e-6, fmt("N=2 PPT vs dense solve %.2e", n2));

  double pure = 0;
  for (double theta : {0.5, pi / 2, 2.3})
    for (int n = 1; n <= 10; ++n) {
      const StatePair pair = make_state_pair(1, 1, theta);
      pure = std::max(pure, std::fabs(ppt_error(pair, n).error - collective_error(pair, n)));
    }
  c.expect(pure <= 1e-6, fmt("pure-state PPT vs collective %.2e", pure));
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 300, fmt("runtime %.1f s", elapsed));
  c.note(fmt("N=1 %.1e, N=2 %.1e", n1, n2) + fmt(", pure %.1e, %.1f s", pure, elapsed));
  return c.done();
}

Outcome strategy_ordering() {
  Checker c;
  const double tol = 1e-5;
  double worst = -1;
  int cells = 0;
  for (double r : {0.3, 0.5, 0.8, 0.95})
    for (double theta : {pi / 4, pi / 2, 3 * pi / 4}) {
      const StatePair pair = make_state_pair(r, r, theta);
      const DpResult dp = dp_solve(pair, 8);
      for (int n = 1; n <= 8; ++n) {
        const double col = collective_error(pair, n), ppt = ppt_error(pair, n).error;
        const double ada = dp.error_by_copies[n], rep = repeated_error_opt(pair, n).error;
        const double v = std::max({col - ppt, ppt - ada, ada - rep});
        worst = std::max(worst, v);
        ++cells;
        c.expect(v <= tol, "r=" + fmt("%.2f", r) + fmt(" theta=%.4f", theta) + " N=" + std::to_string(n) +
                               fmt(" violation %.2e", v));
      }
    }
  c.note(std::to_string(cells) + " cells, largest (lower - upper) " + fmt("%.2e", worst));
  return c.done();
}

Outcome critical() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  const CriticalPurity cp = critical_purity(pi / 2);
  const double elapsed = seconds_since(t0);
  c.expect(cp.found, "no transition found");
  c.expect(std::fabs(cp.value - 0.9819) <= 5e-4, fmt("r* = %.6f", cp.value));
  c.expect(elapsed < 120, fmt("runtime %.1f s", elapsed));
  c.note(fmt("r* = %.6f, %.1f s", cp.value, elapsed));
  return c.done();
}

// Half a unit in the third significant digit of `reference`.
double three_digit_tolerance(double reference) {
  return 0.5 * std::pow(10.0, std::floor(std::log10(std::fabs(reference))) - 2);
}

Outcome rate_fits() {
  Checker c;
  std::vector<std::pair<int, double>> col, rep;
  for (int n = 25; n <= 35; ++n) {
    col.emplace_back(n, collective_error(kRefPair, n));
    rep.emplace_back(n, repeated_error_opt(kRefPair, n).error);
  }
  const RateFit fc = fit_rate(col, 25, 35), fr = fit_rate(rep, 25, 35);
  const double qc = quantum_chernoff_exponent(kRefPair), cc = repeated_exponent_opt(kRefPair).exponent;
  c.expect(std::fabs(fc.c0 - qc) <= three_digit_tolerance(qc),
           fmt("collective C0 %.6f vs quantum Chernoff %.6f", fc.c0, qc));
  c.expect(std::fabs(fr.c0 - cc) <= three_digit_tolerance(cc),
           fmt("repeated C0 %.6f vs classical Chernoff %.6f", fr.c0, cc));
  c.note(fmt("collective C0 %.6f / %.6f", fc.c0, qc) + fmt(", repeated C0 %.6f / %.6f", fr.c0, cc) +
         fmt(", tolerance %.1e", three_digit_tolerance(qc)));
  return c.done();
}

Outcome gap_persistence() {
  Checker c;
  double d30 = 0, d35 = 0, dmin = 1;
  for (int n = 10; n <= 35; ++n) {
    const GapResult g = gap(kRefPair, n);
    c.expect(g.ppt_status == "converged", "PPT status at N=" + std::to_string(n) + ": " + g.ppt_status);
    c.expect(g.delta > 0, "Delta(" + std::to_string(n) + fmt(") = %.3e", g.delta));
    dmin = std::min(dmin, g.delta);
    if (n == 30) d30 = g.delta;
    if (n == 35) d35 = g.delta;
  }
  const double rel = std::fabs(d35 - d30) / d35;
  c.expect(rel < 0.05, fmt("|Delta(35) - Delta(30)| / Delta(35) = %.3f", rel));
  c.note(fmt("min Delta %.5f, Delta(30) %.5f", dmin, d30) + fmt(", Delta(35) %.5f, relative change %.4f", d35, rel));
  return c.done();
}

Outcome fidelity_saturation() {
  Checker c;
  double worst = 0, worst_angle = 0;
  for (double r : {0.5, 0.6, 0.7, 0.8}) {
    const StatePair pair = make_state_pair(r, r, pi / 2);
    const ExponentOptimum opt = repeated_exponent_opt(pair);
    const double err = std::fabs(opt.exponent + 0.5 * std::log(fidelity(pair)));
    worst = std::max(worst, err);
    worst_angle = std::max(worst_angle, std::fabs(opt.theta_star - pi / 2));
    c.expect(err <= 1e-6, fmt("r=%.1f exponent error %.2e", r, err));
    c.expect(std::fabs(opt.theta_star - pi / 2) <= 1e-4, fmt("r=%.1f angle %.6f", r, opt.theta_star));
  }
  c.note(fmt("max exponent error %.1e, max angle offset %.1e", worst, worst_angle));
  return c.done();
}

Outcome copies_ratio_check() {
  Checker c;
  const CopiesRatio low = copies_ratio(make_state_pair(0.2, 0.2, pi / 2), 25);
  c.expect(low.f >= 1.0 && low.f <= 1.1, fmt("f(0.2) = %.4f", low.f));
  double fmax = 0, rmax = 0;
  for (int k = 0; k <= 9; ++k) {
    const double r = 0.5 + 0.05 * k;
    const CopiesRatio cr = copies_ratio(make_state_pair(r, r, pi / 2), 25);
    c.expect(cr.ppt_status == "converged", fmt("PPT status at r=%.2f", r) + ": " + cr.ppt_status);
    if (cr.f > fmax) fmax = cr.f, rmax = r;
  }
  c.expect(fmax <= 2.05, fmt("max f = %.4f at r=%.2f", fmax, rmax));
  c.note(fmt("f(0.2) = %.4f, max f = %.4f", low.f, fmax) + fmt(" at r = %.2f", rmax));
  return c.done();
}

Outcome dp_verification() {
  Checker c;
  const auto angles = AngleSearch{}.coarse_angles();
  const double tree = std::fabs(dp_exact(kRefPair, 2, 0.5, angles).error - brute_force_adaptive(kRefPair, 2, angles).error);
  c.expect(tree <= 1e-12, fmt("N=2 DP vs tree %.2e", tree));

  const DpResult dp10 = dp_solve(kRefPair, 10);
  const SimulationResult s0 = simulate(dp10, kRefPair, 0, 1000000, 20240917);
  const SimulationResult s1 = simulate(dp10, kRefPair, 1, 1000000, 20240918);
  const double rate = 0.5 * (s0.success_rate + s1.success_rate);
  const double sigma = 0.5 * std::hypot(s0.std_error, s1.std_error);
  const double z = std::fabs(rate - (1 - dp10.error)) / sigma;
  c.expect(z <= 3, fmt("Monte Carlo off by %.2f sigma", z));

  const double g20 = dp_solve(kRefPair, 25, PriorGrid(20000)).error;
  const double g40 = dp_solve(kRefPair, 25, PriorGrid(40000)).error;
  c.expect(std::fabs(g20 - g40) < 1e-6, fmt("G=20000 vs 40000 differ by %.3e", std::fabs(g20 - g40)));
  c.note(fmt("tree %.1e, MC %.2f sigma", tree, z) + fmt(", P_e(G=20000) %.6e, diff %.2e", g20, std::fabs(g20 - g40)));
  return c.done();
}

Outcome determinism() {
  Checker c;
  SweepSpec s;
  s.r0 = 0.8;
  s.r1 = 0.6;
  s.theta = 1.3;
  s.n_min = 1;
  s.n_max = 6;
  s.seed = 7;
  s.grid_points = 4001;
  const auto csv = [](const SweepSpec& spec) {
    std::ostringstream ss;
    write_csv(ss, sweep_n(spec));
    return ss.str();
  };
  s.workers = 1;
  const std::string a = csv(s), b = csv(s);
  s.workers = 4;
  const std::string d = csv(s);
  c.expect(a == b, "repeat differs");
  c.expect(a == d, "worker count changes output");
  SweepSpec r = s;
  r.r_values = {0.0, 0.4, 0.9};
  r.n_max = 6;
  std::ostringstream x, y;
  write_csv(x, sweep_r(r));
  write_csv(y, sweep_r(r));
  c.expect(x.str() == y.str(), "sweep_r repeat differs");
  c.note(std::to_string(a.size()) + " + " + std::to_string(x.str().size()) + " bytes compared");
  return c.done();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "single-copy coincidence", single_copy},
      {2, "dense-oracle equivalence", dense_oracle},
      {3, "block algebra invariants", block_algebra},
      {4, "PPT solver correctness", ppt_correctness},
      {5, "strategy ordering", strategy_ordering},
      {6, "critical purity", critical},
      {7, "rate fits", rate_fits},
      {8, "gap persistence", gap_persistence},
      {9, "fidelity-regime saturation", fidelity_saturation},
      {10, "copies ratio", copies_ratio_check},
      {11, "DP verification", dp_verification},
      {12, "determinism", determinism},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = cr.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failures += !out.passed;
    std::printf("[%s] %2d %s (%.1f s): %s\n", out.passed ? "PASS" : "FAIL", cr.id, cr.name, seconds_since(t0),
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
