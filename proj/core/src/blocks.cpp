#include "mixdisc/blocks.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <string>
#include <tuple>

#include "mixdisc/errors.hpp"
#include "mixdisc/numeric.hpp"

namespace mixdisc {
namespace {

void check_copies(int n_copies) {
  if (n_copies < 1) {
    throw DomainError("number of copies must be >= 1, got " + std::to_string(n_copies));
  }
}

void check_dense(int n_copies) {
  check_copies(n_copies);
  if (n_copies > kMaxDenseCopies) {
    throw ResourceError("dense path limited to N <= " + std::to_string(kMaxDenseCopies) +
                        ", got N = " + std::to_string(n_copies));
  }
}

// Qubit p (0-based, leftmost first) lives in index bit n - 1 - p.
inline int qubit_bit(std::uint64_t index, int n_copies, int qubit) {
  return static_cast<int>((index >> (n_copies - 1 - qubit)) & 1u);
}

}  // namespace

SpinLabel::SpinLabel(int two_j_in, int two_m_in) : two_j(two_j_in), two_m(two_m_in) {
  if (two_j < 0 || std::abs(two_m) > two_j || (two_j - two_m) % 2 != 0) {
    throw DomainError("invalid spin label 2j=" + std::to_string(two_j) +
                      " 2m=" + std::to_string(two_m));
  }
}

ParamVector::ParamVector(int n_copies) : n_(n_copies) {
  check_copies(n_copies);
  values_.assign(num_params(n_copies), 0.0);
}

ParamVector ParamVector::identity(int n_copies) {
  ParamVector out(n_copies);
  for (int q = 0; q <= n_copies; ++q) out(q, q) = 1.0;
  return out;
}

ParamVector ParamVector::from_values(int n_copies, std::vector<double> values) {
  ParamVector out(n_copies);
  if (values.size() != out.size()) {
    throw DomainError("ParamVector for N=" + std::to_string(n_copies) + " needs " +
                      std::to_string(out.size()) + " values, got " +
                      std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("ParamVector entries must be finite");
  }
  out.values_ = std::move(values);
  return out;
}

std::vector<int> spin_range(int n_copies) {
  check_copies(n_copies);
  std::vector<int> out;
  for (int two_j = n_copies % 2; two_j <= n_copies; two_j += 2) out.push_back(two_j);
  return out;
}

void check_spin(int n_copies, int two_j) {
  check_copies(n_copies);
  if (two_j < 0 || two_j > n_copies || (n_copies - two_j) % 2 != 0) {
    throw DomainError("spin 2j=" + std::to_string(two_j) + " not admissible for N=" +
                      std::to_string(n_copies));
  }
}

std::uint64_t degeneracy(int n_copies, int two_j) {
  check_spin(n_copies, two_j);
  // C(N, N/2 - j) (2j+1) / (N/2 + j + 1); the division is exact.
  const int lower = (n_copies - two_j) / 2;
  const uint128 numerator =
      binomial_exact(n_copies, lower) * static_cast<uint128>(two_j + 1);
  const uint128 denominator = static_cast<uint128>((n_copies + two_j) / 2 + 1);
  const uint128 result = numerator / denominator;
  assert(result * denominator == numerator);
  if (result > static_cast<uint128>(UINT64_MAX)) {
    throw ResourceError("degeneracy overflows 64 bits for N=" + std::to_string(n_copies));
  }
  return static_cast<std::uint64_t>(result);
}

double delta_coeff(const SpinLabel& row, const SpinLabel& col, int k) {
  if (row.two_j != col.two_j) {
    throw DomainError("delta_coeff: labels with different j");
  }
  const int two_j = row.two_j;
  const int j_minus_m = (two_j - row.two_m) / 2;
  const int j_plus_m = (two_j + row.two_m) / 2;
  const int j_minus_mp = (two_j - col.two_m) / 2;
  const int j_plus_mp = (two_j + col.two_m) / 2;
  const int m_minus_mp = (row.two_m - col.two_m) / 2;
  const int a = j_minus_m - k;
  const int b = j_plus_mp - k;
  const int c = m_minus_mp + k;
  if (k < 0 || a < 0 || b < 0 || c < 0) return 0.0;
  const double log_num = 0.5 * (log_factorial(j_minus_m) + log_factorial(j_plus_m) +
                                log_factorial(j_minus_mp) + log_factorial(j_plus_mp));
  const double log_den = log_factorial(a) + log_factorial(b) + log_factorial(c) + log_factorial(k);
  return std::exp(log_num - log_den);
}

double BlockMap::coefficient(const SpinLabel& row, const SpinLabel& col, int q, int r) const {
  if (row.two_j != two_j || col.two_j != two_j) {
    throw DomainError("BlockMap::coefficient: label does not belong to this block");
  }
  if (r < 0 || r > q || q > n_copies) return 0.0;
  const int p = param_index(q, r);
  const auto it = std::lower_bound(params.begin(), params.end(), p);
  if (it == params.end() || *it != p) return 0.0;
  for (const BlockMapEntry& e : columns[it - params.begin()]) {
    if (e.row == row.index() && e.col == col.index()) return e.coeff;
  }
  return 0.0;
}

Eigen::MatrixXd BlockMap::apply(std::span<const double> x) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double xi = x[params[i]];
    if (xi == 0.0) continue;
    for (const BlockMapEntry& e : columns[i]) out(e.row, e.col) += e.coeff * xi;
  }
  return out;
}

BlockMap mmap(int n_copies, int two_j) {
  check_spin(n_copies, two_j);
  BlockMap map;
  map.n_copies = n_copies;
  map.two_j = two_j;
  map.dim = two_j + 1;
  const int singlets = (n_copies - two_j) / 2;  // N/2 - j

  // (param, row, col) -> coefficient
  std::map<std::tuple<int, int, int>, double> coeffs;
  for (int a = 0; a < map.dim; ++a) {
    const SpinLabel row(two_j, two_j - 2 * a);
    for (int b = 0; b < map.dim; ++b) {
      const SpinLabel col(two_j, two_j - 2 * b);
      // r = N/2 - m - k - l, q = N/2 - m' + k + l
      const int half_n_minus_m = (n_copies - row.two_m) / 2;
      const int half_n_minus_mp = (n_copies - col.two_m) / 2;
      for (int k = 0; k <= two_j; ++k) {
        const double delta = delta_coeff(row, col, k);
        if (delta == 0.0) continue;
        for (int l = 0; l <= singlets; ++l) {
          const int r = half_n_minus_m - k - l;
          const int q = half_n_minus_mp + k + l;
          assert(r >= 0 && r <= q && q <= n_copies);
          const double sign = (l % 2 == 0) ? 1.0 : -1.0;
          coeffs[{param_index(q, r), a, b}] += sign * delta * binomial(singlets, l);
        }
      }
    }
  }

  // Symmetrize the map coefficient-wise; analytically (a,b) and (b,a) agree.
  std::map<int, std::vector<BlockMapEntry>> by_param;
  for (const auto& [key, value] : coeffs) {
    const auto [p, a, b] = key;
    const auto mirror = coeffs.find({p, b, a});
    const double other = mirror == coeffs.end() ? 0.0 : mirror->second;
    assert(std::abs(value - other) <= 1e-10 * std::max({1.0, std::abs(value), std::abs(other)}));
    const double sym = 0.5 * (value + other);
    if (sym != 0.0) by_param[p].push_back({a, b, sym});
  }
  // Entries present only as (b,a) still need their (a,b) partner.
  for (const auto& [key, value] : coeffs) {
    const auto [p, a, b] = key;
    if (coeffs.find({p, b, a}) == coeffs.end()) {
      const double sym = 0.5 * value;
      if (sym != 0.0) by_param[p].push_back({b, a, sym});
    }
  }
  map.params.reserve(by_param.size());
  map.columns.reserve(by_param.size());
  for (auto& [p, entries] : by_param) {
    map.params.push_back(p);
    map.columns.push_back(std::move(entries));
  }
  return map;
}

BlockMapTable::BlockMapTable(int n_copies) : n_(n_copies) {
  for (int two_j : spin_range(n_copies)) maps_.push_back(mmap(n_copies, two_j));
}

const BlockMap& BlockMapTable::at(int two_j) const {
  check_spin(n_, two_j);
  return maps_[(two_j - n_ % 2) / 2];
}

Eigen::MatrixXd assemble_block(const ParamVector& params, int two_j) {
  check_spin(params.n_copies(), two_j);
  const Eigen::MatrixXd raw = mmap(params.n_copies(), two_j).apply(params.values());
  assert((raw - raw.transpose()).cwiseAbs().maxCoeff() <=
         1e-10 * std::max(1.0, raw.cwiseAbs().maxCoeff()));
  return 0.5 * (raw + raw.transpose());
}

double BlockOperator::trace() const {
  double total = 0.0;
  for (const auto& [two_j, block] : blocks) {
    total += static_cast<double>(degeneracies.at(two_j)) * block.trace();
  }
  return total;
}

BlockOperator assemble(const ParamVector& params) {
  BlockOperator out;
  out.n_copies = params.n_copies();
  for (int two_j : spin_range(params.n_copies())) {
    out.blocks[two_j] = assemble_block(params, two_j);
    out.degeneracies[two_j] = degeneracy(params.n_copies(), two_j);
  }
  return out;
}

Eigen::MatrixXd sigma_block(const StatePair& pair, int which, int n_copies, int two_j) {
  check_spin(n_copies, two_j);
  if (which != 0 && which != 1) throw DomainError("sigma_block: which must be 0 or 1");
  const double r = pair.purity(which);
  const double c = std::cos(pair.theta / 2);
  const double off = (which == 0 ? 1.0 : -1.0) * r * std::sin(pair.theta / 2);
  const double up = 1 + r * c;
  const double down = 1 - r * c;
  const int singlets = (n_copies - two_j) / 2;
  const double prefactor = std::ldexp(std::pow(1 - r * r, singlets), -n_copies);

  const int dim = two_j + 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  if (prefactor == 0.0) return out;
  for (int a = 0; a < dim; ++a) {
    const SpinLabel row(two_j, two_j - 2 * a);
    for (int b = 0; b < dim; ++b) {
      const SpinLabel col(two_j, two_j - 2 * b);
      const int m_minus_mp = (row.two_m - col.two_m) / 2;
      const int j_plus_mp = (two_j + col.two_m) / 2;
      const int j_minus_m = (two_j - row.two_m) / 2;
      double sum = 0.0;
      for (int k = 0; k <= two_j; ++k) {
        const double delta = delta_coeff(row, col, k);
        if (delta == 0.0) continue;
        sum += delta * std::pow(off, m_minus_mp + 2 * k) * std::pow(up, j_plus_mp - k) *
               std::pow(down, j_minus_m - k);
      }
      out(a, b) = prefactor * sum;
    }
  }
  return 0.5 * (out + out.transpose());
}

BlockOperator sigma_blocks(const StatePair& pair, int which, int n_copies) {
  BlockOperator out;
  out.n_copies = n_copies;
  for (int two_j : spin_range(n_copies)) {
    out.blocks[two_j] = sigma_block(pair, which, n_copies, two_j);
    out.degeneracies[two_j] = degeneracy(n_copies, two_j);
  }
  return out;
}

Eigen::MatrixXd wigner_d(int two_j, double beta) {
  if (two_j < 0) throw DomainError("wigner_d: negative spin");
  const double c = std::cos(beta / 2);
  const double s = std::sin(beta / 2);
  const int dim = two_j + 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    const SpinLabel row(two_j, two_j - 2 * a);
    for (int b = 0; b < dim; ++b) {
      const SpinLabel col(two_j, two_j - 2 * b);
      const int m_minus_mp = (row.two_m - col.two_m) / 2;
      double sum = 0.0;
      for (int k = 0; k <= two_j; ++k) {
        const double delta = delta_coeff(row, col, k);
        if (delta == 0.0) continue;
        const double sign = ((m_minus_mp + k) % 2 == 0) ? 1.0 : -1.0;
        sum += sign * delta * std::pow(c, two_j - m_minus_mp - 2 * k) *
               std::pow(s, m_minus_mp + 2 * k);
      }
      out(a, b) = sum;
    }
  }
  return out;
}

double cg_coeff(int n_copies, int two_j, int two_m, std::string_view bits) {
  check_spin(n_copies, two_j);
  const SpinLabel label(two_j, two_m);
  if (static_cast<int>(bits.size()) != n_copies) {
    throw DomainError("cg_coeff: bit pattern length " + std::to_string(bits.size()) +
                      " != N=" + std::to_string(n_copies));
  }
  int ones = 0;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw DomainError("cg_coeff: bit pattern must be 0/1");
    ones += ch == '1';
  }
  // sum of magnetic numbers = (zeros - ones)/2 must equal m
  if (n_copies - 2 * ones != label.two_m) {
    throw DomainError("cg_coeff: magnetic numbers of the pattern do not sum to m");
  }
  const int singlets = (n_copies - two_j) / 2;
  int mu_pairs = 0;
  for (int i = 0; i < singlets; ++i) {
    const char first = bits[2 * i];
    const char second = bits[2 * i + 1];
    if (first == second) return 0.0;
    if (first == '1') ++mu_pairs;
  }
  const double sign = (mu_pairs % 2 == 0) ? 1.0 : -1.0;
  return sign * std::pow(0.5, 0.5 * singlets) /
         std::sqrt(binomial(two_j, (two_j + two_m) / 2));
}

Eigen::VectorXd coupled_basis_vector(int n_copies, int two_j, int two_m) {
  check_dense(n_copies);
  check_spin(n_copies, two_j);
  const SpinLabel label(two_j, two_m);
  const std::uint64_t dim = std::uint64_t{1} << n_copies;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  std::string bits(n_copies, '0');
  for (std::uint64_t index = 0; index < dim; ++index) {
    const int ones = std::popcount(index);
    if (n_copies - 2 * ones != label.two_m) continue;
    for (int p = 0; p < n_copies; ++p) bits[p] = qubit_bit(index, n_copies, p) ? '1' : '0';
    out(static_cast<Eigen::Index>(index)) = cg_coeff(n_copies, two_j, two_m, bits);
  }
  return out;
}

Eigen::MatrixXd project_to_block(const Eigen::MatrixXd& dense, int n_copies, int two_j) {
  check_dense(n_copies);
  const Eigen::Index full = Eigen::Index{1} << n_copies;
  if (dense.rows() != full || dense.cols() != full) {
    throw DomainError("project_to_block: matrix is not 2^N x 2^N");
  }
  const int dim = two_j + 1;
  Eigen::MatrixXd basis(full, dim);
  for (int a = 0; a < dim; ++a) basis.col(a) = coupled_basis_vector(n_copies, two_j, two_j - 2 * a);
  return basis.transpose() * dense * basis;
}

Eigen::MatrixXd reconstruct_dense(const ParamVector& params) {
  const int n = params.n_copies();
  check_dense(n);
  const std::uint64_t dim = std::uint64_t{1} << n;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::uint64_t y = 0; y < dim; ++y) {
      const int r = std::popcount(x & y);
      const int q = std::popcount(x | y);
      out(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = params(q, r);
    }
  }
  return out;
}

Eigen::MatrixXd sigma_dense(const StatePair& pair, int which, int n_copies) {
  check_dense(n_copies);
  if (which != 0 && which != 1) throw DomainError("sigma_dense: which must be 0 or 1");
  const Eigen::Matrix2d& rho = pair.rho(which);
  Eigen::MatrixXd out = rho;
  for (int p = 1; p < n_copies; ++p) {
    Eigen::MatrixXd next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index k = 0; k < out.cols(); ++k) {
        next.block<2, 2>(2 * i, 2 * k) = out(i, k) * rho;
      }
    }
    out = std::move(next);
  }
  return out;
}

Eigen::MatrixXd partial_transpose(const Eigen::MatrixXd& dense, int n_copies,
                                  std::uint64_t mask) {
  check_dense(n_copies);
  const std::uint64_t dim = std::uint64_t{1} << n_copies;
  if (static_cast<std::uint64_t>(dense.rows()) != dim ||
      static_cast<std::uint64_t>(dense.cols()) != dim) {
    throw DomainError("partial_transpose: matrix is not 2^N x 2^N");
  }
  Eigen::MatrixXd out(dense.rows(), dense.cols());
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::uint64_t y = 0; y < dim; ++y) {
      const std::uint64_t swap = (x ^ y) & mask;
      out(static_cast<Eigen::Index>(x ^ swap), static_cast<Eigen::Index>(y ^ swap)) =
          dense(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }
  }
  return out;
}

}  // namespace mixdisc
