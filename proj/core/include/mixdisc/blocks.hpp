#pragma once

// Block-diagonal form of operators on N qubits that are invariant under permutations of
// the qubits and under partial transposition of any subset of them.
//
// Spins are stored doubled (two_j, two_m) so half-integers stay exact. Inside a spin-j
// block the row/column index is j - m, i.e. index 0 is m = +j. Qubit |0> maps to
// m = +1/2, so for N = 1 the block coincides with the 2x2 matrix in the computational
// basis.
//
// The independent real parameters of such an operator are E^q_r, 0 <= r <= q <= N: the
// matrix element between a row bit string with r ones and a column bit string with q
// ones, the r ones of the row sitting on top of ones of the column. For arbitrary bit
// strings x (row) and y (column) the element is E^q_r with r = |x AND y| and
// q = |x OR y|.

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mixdisc/qubit.hpp"

namespace mixdisc {

/// Largest N accepted by the dense 2^N x 2^N reference paths.
inline constexpr int kMaxDenseCopies = 12;

struct SpinLabel {
  int two_j;
  int two_m;

  /// Throws DomainError unless two_j >= 0, |two_m| <= two_j and two_m = two_j (mod 2).
  SpinLabel(int two_j, int two_m);

  /// Row/column position inside the spin-j block.
  int index() const { return (two_j - two_m) / 2; }
};

inline int num_params(int n_copies) { return (n_copies + 1) * (n_copies + 2) / 2; }
inline int param_index(int q, int r) { return q * (q + 1) / 2 + r; }

class ParamVector {
 public:
  explicit ParamVector(int n_copies);

  /// E^q_q = 1, everything else 0: the identity operator.
  static ParamVector identity(int n_copies);
  static ParamVector from_values(int n_copies, std::vector<double> values);

  int n_copies() const { return n_; }
  std::size_t size() const { return values_.size(); }

  double operator()(int q, int r) const { return values_[param_index(q, r)]; }
  double& operator()(int q, int r) { return values_[param_index(q, r)]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

 private:
  int n_;
  std::vector<double> values_;
};

/// Admissible 2j for N spins-1/2, ascending: N mod 2, N mod 2 + 2, ..., N.
std::vector<int> spin_range(int n_copies);

/// Throws DomainError if 2j is not admissible for N.
void check_spin(int n_copies, int two_j);

/// Multiplicity of the spin-j irrep in N coupled spins-1/2,
/// C(N, N/2 - j) (2j + 1) / (N/2 + j + 1), in exact integer arithmetic.
std::uint64_t degeneracy(int n_copies, int two_j);

/// [Delta^(j)_k]^{m'}_m for row label (j, m) and column label (j, m'). Zero whenever a
/// factorial argument is negative.
double delta_coeff(const SpinLabel& row, const SpinLabel& col, int k);

struct BlockMapEntry {
  int row;
  int col;
  double coeff;
};

/// Linear map from a ParamVector to the spin-j block, stored column-wise: for every
/// parameter that enters the block, the list of block entries it feeds (both triangles).
struct BlockMap {
  int n_copies = 0;
  int two_j = 0;
  int dim = 0;
  std::vector<int> params;
  std::vector<std::vector<BlockMapEntry>> columns;

  /// Coefficient [M^(j)]^{m' r}_{m q} of E^q_r in entry (row m, col m').
  double coefficient(const SpinLabel& row, const SpinLabel& col, int q, int r) const;

  /// Block for an arbitrary parameter vector (not symmetrized).
  Eigen::MatrixXd apply(std::span<const double> x) const;
};

/// The map E^q_r -> [E^(j)]_m^{m'}.
BlockMap mmap(int n_copies, int two_j);

/// All maps for a given N, ascending in 2j. Built once, read-only afterwards.
class BlockMapTable {
 public:
  explicit BlockMapTable(int n_copies);

  int n_copies() const { return n_; }
  const std::vector<BlockMap>& maps() const { return maps_; }
  const BlockMap& at(int two_j) const;

 private:
  int n_;
  std::vector<BlockMap> maps_;
};

/// E^(j) from parameters, symmetrized by averaging with its transpose.
Eigen::MatrixXd assemble_block(const ParamVector& params, int two_j);

/// Family of spin blocks with their multiplicities.
struct BlockOperator {
  int n_copies = 0;
  std::map<int, Eigen::MatrixXd> blocks;
  std::map<int, std::uint64_t> degeneracies;

  /// sum_j n_j tr E^(j), the trace of the full operator.
  double trace() const;
};

BlockOperator assemble(const ParamVector& params);

/// Spin-j block of rho_which^{(x)N} from the closed form in Bloch data.
Eigen::MatrixXd sigma_block(const StatePair& pair, int which, int n_copies, int two_j);

BlockOperator sigma_blocks(const StatePair& pair, int which, int n_copies);

/// Wigner small-d matrix d^(j)(beta) for a rotation about y, rows and columns ordered by
/// decreasing m.
Eigen::MatrixXd wigner_d(int two_j, double beta);

/// <b_1 ... b_N | j, m> for the coupled basis that pairs the first N - 2j qubits in
/// singlets (|01> - |10>)/sqrt(2) and symmetrizes the rest. `bits` is a string of '0'/'1'
/// of length N, qubit 1 first. Returns 0 when a leading pair is not 01 or 10. Throws
/// DomainError for a malformed string or when the magnetic numbers do not sum to m.
double cg_coeff(int n_copies, int two_j, int two_m, std::string_view bits);

/// Dense coupled basis vector |j, m> in the computational basis (qubit 1 is the most
/// significant bit of the index).
Eigen::VectorXd coupled_basis_vector(int n_copies, int two_j, int two_m);

/// <j,m| dense |j,m'> for all m, m' of one spin-j copy.
Eigen::MatrixXd project_to_block(const Eigen::MatrixXd& dense, int n_copies, int two_j);

/// The 2^N x 2^N operator with the given independent components.
Eigen::MatrixXd reconstruct_dense(const ParamVector& params);

/// rho_which^{(x)N}.
Eigen::MatrixXd sigma_dense(const StatePair& pair, int which, int n_copies);

/// Partial transpose on the qubits whose index bits are set in `mask`.
Eigen::MatrixXd partial_transpose(const Eigen::MatrixXd& dense, int n_copies,
                                  std::uint64_t mask);

}  // namespace mixdisc
