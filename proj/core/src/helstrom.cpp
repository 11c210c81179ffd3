#include "mixdisc/helstrom.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "mixdisc/blocks.hpp"
#include "mixdisc/errors.hpp"

namespace mixdisc {
namespace {

double trace_norm(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("trace_norm: eigensolver failed");
  return solver.eigenvalues().cwiseAbs().sum();
}

double from_trace_distance(double norm) {
  return std::clamp(0.5 * (1.0 - 0.5 * norm), 0.0, 0.5);
}

}  // namespace

double collective_error(const StatePair& pair, int n_copies) {
  if (n_copies < 1) throw DomainError("collective_error: N must be >= 1");
  if (pair.identical()) return 0.5;
  double norm = 0.0;
  for (int two_j : spin_range(n_copies)) {
    const Eigen::MatrixXd diff =
        sigma_block(pair, 0, n_copies, two_j) - sigma_block(pair, 1, n_copies, two_j);
    norm += static_cast<double>(degeneracy(n_copies, two_j)) * trace_norm(diff);
  }
  return from_trace_distance(norm);
}

double collective_error_dense(const StatePair& pair, int n_copies) {
  const Eigen::MatrixXd diff = sigma_dense(pair, 0, n_copies) - sigma_dense(pair, 1, n_copies);
  return from_trace_distance(trace_norm(diff));
}

}  // namespace mixdisc
