#include "mixdisc/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mixdisc/errors.hpp"
#include "mixdisc/helstrom.hpp"
#include "mixdisc/local.hpp"
#include "oracles.hpp"

using namespace mixdisc;
using std::numbers::pi;

namespace {

// Direct evaluation of sum_j n_j tr[(sigma0 - sigma1) E(x)] through the block routines.
double contraction(const StatePair& pair, const ParamVector& x) {
  const int n = x.n_copies();
  double total = 0.0;
  for (int two_j : spin_range(n)) {
    const Eigen::MatrixXd diff = sigma_block(pair, 0, n, two_j) - sigma_block(pair, 1, n, two_j);
    total += static_cast<double>(degeneracy(n, two_j)) *
             (diff.cwiseProduct(assemble_block(x, two_j))).sum();
  }
  return total;
}

}  // namespace

TEST(PptInstance, identical_states_give_zero_objective) {
  const SDPInstance inst = build_ppt_instance(make_state_pair(0.6, 0.6, 0.0), 4);
  for (double c : inst.objective) EXPECT_EQ(c, 0.0);
  EXPECT_EQ(ppt_error(make_state_pair(0.6, 0.6, 0.0), 4).error, 0.5);
}

TEST(PptInstance, single_copy_has_three_parameters) {
  const SDPInstance inst = build_ppt_instance(make_state_pair(0.8, 0.8, pi / 2), 1);
  EXPECT_EQ(inst.objective.size(), 3u);
  EXPECT_EQ(inst.n_copies, 1);
  EXPECT_DOUBLE_EQ(inst.constant_offset, 0.5);
}

TEST(PptInstance, objective_matches_block_contraction) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int n : {1, 2, 4, 7}) {
    const StatePair pair = make_state_pair(0.7, 0.4, 1.1);
    const SDPInstance inst = build_ppt_instance(pair, n);
    for (int trial = 0; trial < 5; ++trial) {
      ParamVector x(n);
      for (double& v : x.values()) v = unit(rng);
      double cx = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) cx += inst.objective[i] * x.values()[i];
      EXPECT_NEAR(cx, contraction(pair, x), 1e-12) << "N=" << n;
    }
  }
}

TEST(PptSolve, rejects_tiny_tolerance) {
  const SDPInstance inst = build_ppt_instance(make_state_pair(0.8, 0.8, pi / 2), 2);
  SolverOptions opt;
  opt.tol = 1e-11;
  EXPECT_THROW(solve(inst, opt), DomainError);
}

TEST(PptSolve, single_copy_equals_helstrom) {
  const StatePair pair = make_state_pair(0.8, 0.8, pi / 2);
  EXPECT_NEAR(ppt_error(pair, 1, 1e-10).error, collective_error(pair, 1), 1e-9);
  EXPECT_NEAR(ppt_error(pair, 1).error, 0.217157, 1e-6);
  for (double r1 : {0.2, 0.9}) {
    const StatePair p = make_state_pair(0.5, r1, 2.0);
    EXPECT_NEAR(ppt_error(p, 1, 1e-10).error, collective_error(p, 1), 1e-9);
  }
}

TEST(PptSolve, two_copies_match_dense_admm) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int trial = 0; trial < 4; ++trial) {
    const double r0 = unit(rng), r1 = unit(rng), theta = pi * unit(rng);
    const oracle::DenseSdpResult ref = oracle::ppt_dense(r0, r1, theta, 2);
    ASSERT_LT(ref.residual, 1e-9);
    EXPECT_NEAR(ppt_error(make_state_pair(r0, r1, theta), 2, 1e-10).error, ref.error, 1e-6)
        << r0 << ' ' << r1 << ' ' << theta;
  }
}

TEST(PptSolve, three_copies_match_dense_admm) {
  const oracle::DenseSdpResult ref = oracle::ppt_dense(0.8, 0.8, pi / 2, 3);
  ASSERT_LT(ref.residual, 1e-9);
  EXPECT_NEAR(ppt_error(make_state_pair(0.8, 0.8, pi / 2), 3, 1e-10).error, ref.error, 1e-6);
}

TEST(PptSolve, pure_states_equal_collective) {
  for (double theta : {0.7, pi / 2, 2.4})
    for (int n : {2, 5, 10}) {
      const StatePair pair = make_state_pair(1.0, 1.0, theta);
      EXPECT_NEAR(ppt_error(pair, n).error, collective_error(pair, n), 1e-6) << theta << ' ' << n;
    }
}

TEST(PptSolve, ten_copies_sit_between_collective_and_repeated) {
  const StatePair pair = make_state_pair(0.8, 0.8, pi / 2);
  const double ppt = ppt_error(pair, 10).error;
  EXPECT_GT(ppt, collective_error(pair, 10));
  EXPECT_LT(ppt, repeated_error_opt(pair, 10).error);
}

TEST(PptSolve, certificate_and_monotone_outer_values) {
  const StatePair pair = make_state_pair(0.8, 0.6, 1.3);
  for (int n : {3, 8, 15}) {
    const SDPInstance inst = build_ppt_instance(pair, n);
    SolverOptions opt;
    opt.tol = default_tolerance(n);
    const SDPSolution sol = solve(inst, opt);
    ASSERT_EQ(sol.status, SolverStatus::Converged) << n;
    EXPECT_LT(sol.gap, opt.tol);
    EXPECT_GE(sol.min_eigenvalue, -opt.tol);
    EXPECT_LE(sol.max_eigenvalue, 1 + opt.tol);
    ASSERT_FALSE(sol.outer_values.empty());
    for (std::size_t i = 1; i < sol.outer_values.size(); ++i)
      EXPECT_LE(sol.outer_values[i], sol.outer_values[i - 1] + 1e-12) << "N=" << n;
    EXPECT_NEAR(sol.value, sol.outer_values.back(), 1e-15);
  }
}

TEST(PptSolve, step_cap_reports_max_iterations) {
  const SDPInstance inst = build_ppt_instance(make_state_pair(0.8, 0.8, pi / 2), 6);
  SolverOptions opt;
  opt.max_newton_steps = 3;
  const SDPSolution sol = solve(inst, opt);
  EXPECT_EQ(sol.status, SolverStatus::MaxIterations);
  EXPECT_GE(sol.min_eigenvalue, 0.0);
  EXPECT_LE(sol.max_eigenvalue, 1.0);
}

TEST(PptSolve, default_tolerance_policy) {
  EXPECT_EQ(default_tolerance(25), 1e-8);
  EXPECT_EQ(default_tolerance(26), 1e-7);
}

TEST(PptSolve, status_strings) {
  EXPECT_STREQ(to_string(SolverStatus::Converged), "converged");
  EXPECT_STREQ(to_string(SolverStatus::MaxIterations), "max-iterations");
  EXPECT_STREQ(to_string(SolverStatus::NumericalFailure), "numerical-failure");
}
