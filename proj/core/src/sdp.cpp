#include "mixdisc/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "mixdisc/errors.hpp"

namespace mixdisc {
namespace {

constexpr double kMinTolerance = 1e-10;
// Newton decrement^2 / 2 below which a barrier subproblem counts as centered.
constexpr double kCenteringTol = 1e-9;
constexpr double kMinStep = 1e-14;
constexpr double kRoundoffDecrement = 1e-6;
constexpr double kNoiseFloorDecrement = 1e-4;

template <class T>
constexpr bool kWidest = std::is_same_v<T, long double>;

struct ScaledColumn {
  int param;
  std::vector<BlockMapEntry> entries;  // coefficients already multiplied by the scale
};

struct ScaledBlock {
  int dim;
  std::vector<ScaledColumn> columns;
};

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Cholesky factors of E and I - E for one block, or failure if either is not PD.
template <class T>
struct BlockFactor {
  Eigen::LLT<Mat<T>> lower;
  Eigen::LLT<Mat<T>> upper;
  T logdet = 0;
  bool ok = false;
};

template <class T>
T llt_logdet(const Eigen::LLT<Mat<T>>& llt) {
  using std::log;
  T sum = 0;
  for (Eigen::Index i = 0; i < llt.matrixLLT().rows(); ++i) sum += log(llt.matrixLLT()(i, i));
  return 2 * sum;
}

template <class T>
BlockFactor<T> factor(const ScaledBlock& block, const Vec<T>& y) {
  BlockFactor<T> f;
  Mat<T> e = Mat<T>::Zero(block.dim, block.dim);
  for (const ScaledColumn& col : block.columns) {
    const T v = y[col.param];
    if (v == T(0)) continue;
    for (const BlockMapEntry& en : col.entries) e(en.row, en.col) += T(en.coeff) * v;
  }
  f.lower.compute(e);
  if (f.lower.info() != Eigen::Success) return f;
  f.upper.compute(Mat<T>::Identity(block.dim, block.dim) - e);
  if (f.upper.info() != Eigen::Success) return f;
  f.logdet = llt_logdet(f.lower) + llt_logdet(f.upper);
  using std::isfinite;
  f.ok = isfinite(f.logdet);
  return f;
}

template <class T>
struct Factors {
  std::vector<BlockFactor<T>> blocks;
  T logdet = 0;
  bool ok = false;
};

template <class T>
Factors<T> factor_all(const std::vector<ScaledBlock>& blocks, const Vec<T>& y) {
  Factors<T> out;
  out.blocks.reserve(blocks.size());
  for (const ScaledBlock& b : blocks) {
    out.blocks.push_back(factor(b, y));
    if (!out.blocks.back().ok) return out;
    out.logdet += out.blocks.back().logdet;
  }
  out.ok = true;
  return out;
}

// Gradient and Hessian of -sum_j [log det E_j + log det (I - E_j)].
template <class T>
void barrier_derivatives(const std::vector<ScaledBlock>& blocks, const Factors<T>& factors,
                         Vec<T>& grad, Mat<T>& hess) {
  grad.setZero();
  hess.setZero();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const ScaledBlock& block = blocks[b];
    const int d = block.dim;
    const Mat<T> id = Mat<T>::Identity(d, d);
    const Mat<T> s_inv = factors.blocks[b].lower.solve(id);
    const Mat<T> t_inv = factors.blocks[b].upper.solve(id);
    const Mat<T> diff = s_inv - t_inv;
    Mat<T> a(d, d);
    const auto& cols = block.columns;
    for (std::size_t t = 0; t < cols.size(); ++t) {
      T g = 0;
      a.setZero();
      for (const BlockMapEntry& en : cols[t].entries) {
        const T f = en.coeff;
        g += f * diff(en.col, en.row);
        a.noalias() += f * s_inv.col(en.row) * s_inv.row(en.col);
        a.noalias() += f * t_inv.col(en.row) * t_inv.row(en.col);
      }
      grad[cols[t].param] -= g;
      for (std::size_t k = t; k < cols.size(); ++k) {
        T h = 0;
        for (const BlockMapEntry& en : cols[k].entries) h += T(en.coeff) * a(en.col, en.row);
        hess(cols[t].param, cols[k].param) += h;
        if (k != t) hess(cols[k].param, cols[t].param) += h;
      }
    }
  }
}

std::vector<ScaledBlock> scaled_blocks(const BlockMapTable& maps, std::vector<double>& scale) {
  const int p = num_params(maps.n_copies());
  std::vector<double> norm2(p, 0.0);
  for (const BlockMap& m : maps.maps())
    for (std::size_t t = 0; t < m.params.size(); ++t)
      for (const BlockMapEntry& en : m.columns[t]) norm2[m.params[t]] += en.coeff * en.coeff;
  scale.assign(p, 1.0);
  for (int i = 0; i < p; ++i)
    if (norm2[i] > 0.0) scale[i] = 1.0 / std::sqrt(norm2[i]);

  std::vector<ScaledBlock> out;
  for (const BlockMap& m : maps.maps()) {
    ScaledBlock block{m.dim, {}};
    for (std::size_t t = 0; t < m.params.size(); ++t) {
      ScaledColumn col{m.params[t], m.columns[t]};
      for (BlockMapEntry& en : col.entries) en.coeff *= scale[col.param];
      block.columns.push_back(std::move(col));
    }
    out.push_back(std::move(block));
  }
  return out;
}

struct PathProblem {
  std::vector<ScaledBlock> blocks;
  std::vector<double> scale;
  std::vector<double> objective;  // unscaled c
  Eigen::VectorXd c;              // scaled and normalized
  double c_scale = 0.0;
  double barrier_dim = 0.0;
  SolverOptions options;
};

template <class T>
struct PathState {
  Vec<T> y;
  Vec<T> previous_center;
  bool have_previous = false;
  double mu = 1.0;
};

enum class PathExit { Done, Failed, Capped };

// c.x in the caller's units, accumulated in extended precision.
template <class Range>
double objective_value(const PathProblem& prob, const Range& y) {
  long double v = 0;
  for (std::size_t i = 0; i < prob.objective.size(); ++i)
    v += static_cast<long double>(prob.objective[i]) * prob.scale[i] * y[i];
  return static_cast<double>(v);
}

// Barrier path following in scalar type T until the gap bound reaches the tolerance.
template <class T>
PathExit follow_path(const PathProblem& prob, PathState<T>& st, SDPSolution& sol) {
  using std::isfinite;
  using std::sqrt;
  const int p = static_cast<int>(prob.c.size());
  const Vec<T> c = prob.c.cast<T>();
  Factors<T> current = factor_all<T>(prob.blocks, st.y);
  if (!current.ok) throw NumericalError("barrier iterate is not strictly feasible");
  Vec<T> grad(p);
  Mat<T> hess(p, p);

  for (;;) {
    // Centering: damped Newton on c.y / mu - log det barrier.
    for (;;) {
      if (sol.iterations >= prob.options.max_newton_steps) return PathExit::Capped;
      barrier_derivatives(prob.blocks, current, grad, hess);
      grad += c / T(st.mu);
      // Jacobi equilibration: near the boundary the Hessian spans many orders of magnitude.
      const Vec<T> equil = hess.diagonal()
                               .cwiseMax(std::numeric_limits<T>::min())
                               .cwiseSqrt()
                               .cwiseInverse();
      const Mat<T> scaled = equil.asDiagonal() * hess * equil.asDiagonal();
      Eigen::LDLT<Mat<T>> ldlt(scaled);
      if (ldlt.info() != Eigen::Success) return PathExit::Failed;
      const Vec<T> dy = equil.asDiagonal() * ldlt.solve((equil.asDiagonal() * (-grad)).eval());
      const T slope = grad.dot(dy);
      const T decrement2 = -slope;
      if (!isfinite(decrement2)) return PathExit::Failed;
      if (decrement2 < -T(kRoundoffDecrement)) {
        // Roundoff in an ill-conditioned Hessian. In double this hands over to long
        // double; in long double the decrement has hit its noise floor, and a point that
        // close to the center is accepted.
        if (!kWidest<T> || -decrement2 / 2 > T(kNoiseFloorDecrement)) return PathExit::Failed;
        break;
      }
      if (decrement2 / 2 <= T(kCenteringTol)) break;
      ++sol.iterations;

      const T lambda = sqrt(decrement2);
      T alpha = lambda > T(0.25) ? T(1) / (1 + lambda) : T(1);
      const T c_step = c.dot(dy) / T(st.mu);
      bool moved = false;
      while (alpha >= T(kMinStep)) {
        const Vec<T> trial = st.y + alpha * dy;
        Factors<T> f = factor_all<T>(prob.blocks, trial);
        // Change in the barrier objective, formed as a difference so the large c.y / mu
        // term does not swamp it.
        if (f.ok && alpha * c_step - (f.logdet - current.logdet) <= T(0.25) * alpha * slope) {
          st.y = trial;
          current = std::move(f);
          moved = true;
          break;
        }
        alpha /= 2;
      }
      if (!moved) {
        // Roundoff-limited: accept the point as centered if it nearly is.
        if (decrement2 / 2 > T(kNoiseFloorDecrement)) return PathExit::Failed;
        break;
      }
    }

    sol.outer_values.push_back(objective_value(prob, st.y));
    sol.gap = st.mu * prob.barrier_dim * prob.c_scale;
    if (sol.gap < prob.options.tol) return PathExit::Done;
    st.mu *= prob.options.mu_factor;

    // Predictor: the central path is close to affine in mu, so extrapolate through the
    // last two centers. Kept only if strictly feasible.
    if (st.have_previous) {
      const Vec<T> guess = st.y + T(prob.options.mu_factor) * (st.y - st.previous_center);
      st.previous_center = st.y;
      Factors<T> f = factor_all<T>(prob.blocks, guess);
      if (f.ok) {
        st.y = guess;
        current = std::move(f);
      }
    } else {
      st.previous_center = st.y;
      st.have_previous = true;
    }
  }
}

void fill_eigen_extremes(const SDPInstance& instance, SDPSolution& sol) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const BlockMap& m : instance.maps->maps()) {
    Eigen::MatrixXd e = m.apply(sol.params.values());
    e = 0.5 * (e + e.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
    hi = std::max(hi, es.eigenvalues().maxCoeff());
  }
  sol.min_eigenvalue = lo;
  sol.max_eigenvalue = hi;
}

}  // namespace

const char* to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::MaxIterations: return "max-iterations";
    case SolverStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

double default_tolerance(int n_copies) { return n_copies > 25 ? 1e-7 : 1e-8; }

SDPInstance build_ppt_instance(const StatePair& pair, int n_copies) {
  if (n_copies < 1) throw DomainError("n_copies must be >= 1");
  SDPInstance inst;
  inst.n_copies = n_copies;
  inst.maps = std::make_shared<const BlockMapTable>(n_copies);
  inst.objective.assign(num_params(n_copies), 0.0);
  for (const BlockMap& m : inst.maps->maps()) {
    const double weight = static_cast<double>(degeneracy(n_copies, m.two_j));
    const Eigen::MatrixXd d = sigma_block(pair, 0, n_copies, m.two_j) -
                              sigma_block(pair, 1, n_copies, m.two_j);
    for (std::size_t t = 0; t < m.params.size(); ++t) {
      double acc = 0.0;
      for (const BlockMapEntry& en : m.columns[t]) acc += en.coeff * d(en.col, en.row);
      inst.objective[m.params[t]] += weight * acc;
    }
  }
  return inst;
}

SDPSolution solve(const SDPInstance& instance, const SolverOptions& options) {
  if (!(options.tol >= kMinTolerance)) throw DomainError("tol must be >= 1e-10");
  if (!instance.maps || instance.maps->n_copies() != instance.n_copies)
    throw DomainError("instance maps do not match n_copies");
  const int n = instance.n_copies;
  const int p = num_params(n);
  if (static_cast<int>(instance.objective.size()) != p)
    throw DomainError("objective has the wrong length");

  SDPSolution sol;
  sol.params = ParamVector(n);
  for (int q = 0; q <= n; ++q) sol.params(q, q) = 0.5;

  PathProblem prob;
  prob.blocks = scaled_blocks(*instance.maps, prob.scale);
  for (const ScaledBlock& b : prob.blocks) prob.barrier_dim += 2.0 * b.dim;
  prob.c.resize(p);
  for (int i = 0; i < p; ++i) prob.c[i] = instance.objective[i] * prob.scale[i];
  prob.c_scale = prob.c.cwiseAbs().maxCoeff();
  prob.objective = instance.objective;
  prob.options = options;

  if (!(prob.c_scale > 0.0)) {
    fill_eigen_extremes(instance, sol);
    return sol;
  }
  prob.c /= prob.c_scale;

  PathState<double> state;
  state.y.resize(p);
  for (int i = 0; i < p; ++i) state.y[i] = sol.params.values()[i] / prob.scale[i];
  state.mu = options.mu0;

  // Entries of the large-j blocks are alternating sums whose terms exceed the result by
  // ~10^3 at N = 35, while eigenvalues of E near the optimum reach ~1e-9. When double
  // precision can no longer produce a descent direction, the path is resumed from the
  // current (strictly feasible) iterate in long double.
  PathExit exit = follow_path(prob, state, sol);
  std::vector<long double> final_y(state.y.data(), state.y.data() + p);
  if (exit == PathExit::Failed) {
    PathState<long double> wide;
    wide.y = state.y.cast<long double>();
    wide.previous_center = state.previous_center.cast<long double>();
    wide.have_previous = state.have_previous;
    wide.mu = state.mu;
    exit = follow_path(prob, wide, sol);
    final_y.assign(wide.y.data(), wide.y.data() + p);
  }

  for (int i = 0; i < p; ++i)
    sol.params.values()[i] = static_cast<double>(final_y[i] * prob.scale[i]);
  sol.value = objective_value(prob, final_y);
  if (exit == PathExit::Failed) sol.status = SolverStatus::NumericalFailure;
  else if (exit == PathExit::Capped) sol.status = SolverStatus::MaxIterations;
  fill_eigen_extremes(instance, sol);
  return sol;
}

PptResult ppt_error(const StatePair& pair, int n_copies, double tol) {
  SolverOptions options;
  options.tol = tol > 0.0 ? tol : default_tolerance(n_copies);
  const SDPInstance inst = build_ppt_instance(pair, n_copies);
  PptResult out;
  out.solution = solve(inst, options);
  out.error = std::clamp(inst.constant_offset * (1.0 + out.solution.value), 0.0, 0.5);
  return out;
}

}  // namespace mixdisc
