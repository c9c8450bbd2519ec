#include "privmdp/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace privmdp {

Index LinearProgram::num_constraints() const {
  Index bounds = 0;
  for (Index j = 0; j < lower.size(); ++j) bounds += std::isfinite(lower[j]) + std::isfinite(upper[j]);
  return eq_matrix.rows() + ub_matrix.rows() + bounds;
}

LinearProgram nonnegative_lp(VectorXd objective) {
  const Index n = objective.size();
  LinearProgram lp;
  lp.objective = std::move(objective);
  lp.eq_matrix = MatrixXd(0, n);
  lp.eq_rhs = VectorXd(0);
  lp.ub_matrix = MatrixXd(0, n);
  lp.ub_rhs = VectorXd(0);
  lp.lower = VectorXd::Zero(n);
  lp.upper = VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  return lp;
}

double constraint_violation(const LinearProgram& lp, const VectorXd& x) {
  double worst = 0.0;
  if (lp.eq_matrix.rows() > 0) worst = std::max(worst, (lp.eq_matrix * x - lp.eq_rhs).cwiseAbs().maxCoeff());
  if (lp.ub_matrix.rows() > 0) worst = std::max(worst, (lp.ub_matrix * x - lp.ub_rhs).maxCoeff());
  for (Index j = 0; j < x.size(); ++j) {
    if (std::isfinite(lp.lower[j])) worst = std::max(worst, lp.lower[j] - x[j]);
    if (std::isfinite(lp.upper[j])) worst = std::max(worst, x[j] - lp.upper[j]);
  }
  return worst;
}

namespace {

void check_dimensions(const LinearProgram& lp) {
  const Index n = lp.objective.size();
  auto fail = [](const char* what) { throw InvalidInput(std::string("solve_lp: ") + what); };
  if (lp.eq_matrix.cols() != n || lp.eq_matrix.rows() != lp.eq_rhs.size()) fail("equality block dimension mismatch");
  if (lp.ub_matrix.cols() != n || lp.ub_matrix.rows() != lp.ub_rhs.size()) fail("inequality block dimension mismatch");
  if (lp.lower.size() != n || lp.upper.size() != n) fail("bound vectors must have one entry per variable");
  if (!lp.objective.allFinite() || !lp.eq_matrix.allFinite() || !lp.eq_rhs.allFinite() || !lp.ub_matrix.allFinite() ||
      !lp.ub_rhs.allFinite())
    fail("non-finite coefficient");
  for (Index j = 0; j < n; ++j) {
    if (std::isnan(lp.lower[j]) || std::isnan(lp.upper[j])) fail("NaN bound");
    if (lp.lower[j] == std::numeric_limits<double>::infinity() || lp.upper[j] == -std::numeric_limits<double>::infinity())
      fail("lower bound +inf or upper bound -inf");
  }
}

// x_j = offset + sign * y[col]  (minus y[col2] for free variables)
struct VariableMap {
  double offset = 0.0;
  double sign = 1.0;
  Index col = -1;
  Index col2 = -1;
};

// Equality-form problem: min c'y s.t. A y = b, y >= 0.
struct StandardForm {
  MatrixXd a;
  VectorXd b;
  VectorXd c;
  std::vector<VariableMap> map;
};

StandardForm to_standard_form(const LinearProgram& lp) {
  const Index n = lp.num_variables();
  std::vector<VariableMap> map(static_cast<std::size_t>(n));
  std::vector<Index> capped;  // shifted variables with a finite upper bound
  Index cols = 0;
  for (Index j = 0; j < n; ++j) {
    auto& v = map[static_cast<std::size_t>(j)];
    const bool lo = std::isfinite(lp.lower[j]), hi = std::isfinite(lp.upper[j]);
    if (lo) {
      v = {lp.lower[j], 1.0, cols++, -1};
      if (hi) capped.push_back(j);
    } else if (hi) {
      v = {lp.upper[j], -1.0, cols++, -1};
    } else {
      v = {0.0, 1.0, cols, cols + 1};
      cols += 2;
    }
  }
  const Index n_ub = lp.ub_matrix.rows();
  const Index n_cap = static_cast<Index>(capped.size());
  const Index slack0 = cols;
  cols += n_ub + n_cap;
  const Index rows = lp.eq_matrix.rows() + n_ub + n_cap;

  StandardForm sf;
  sf.a = MatrixXd::Zero(rows, cols);
  sf.b = VectorXd::Zero(rows);
  sf.c = VectorXd::Zero(cols);

  auto place = [&](Index row, const Eigen::Ref<const VectorXd>& coeffs, double rhs) {
    double constant = 0.0;
    for (Index j = 0; j < n; ++j) {
      const auto& v = map[static_cast<std::size_t>(j)];
      const double a = coeffs[j];
      if (a == 0.0) continue;
      constant += a * v.offset;
      sf.a(row, v.col) += a * v.sign;
      if (v.col2 >= 0) sf.a(row, v.col2) -= a;
    }
    sf.b[row] = rhs - constant;
  };

  Index row = 0;
  for (Index i = 0; i < lp.eq_matrix.rows(); ++i) place(row++, lp.eq_matrix.row(i).transpose(), lp.eq_rhs[i]);
  for (Index i = 0; i < n_ub; ++i) {
    place(row, lp.ub_matrix.row(i).transpose(), lp.ub_rhs[i]);
    sf.a(row++, slack0 + i) = 1.0;
  }
  for (Index i = 0; i < n_cap; ++i) {
    const Index j = capped[static_cast<std::size_t>(i)];
    sf.a(row, map[static_cast<std::size_t>(j)].col) = 1.0;
    sf.a(row, slack0 + n_ub + i) = 1.0;
    sf.b[row++] = lp.upper[j] - lp.lower[j];
  }
  for (Index j = 0; j < n; ++j) {
    const auto& v = map[static_cast<std::size_t>(j)];
    sf.c[v.col] += v.sign * lp.objective[j];
    if (v.col2 >= 0) sf.c[v.col2] -= lp.objective[j];
  }
  sf.map = std::move(map);
  return sf;
}

enum class PivotOutcome { Optimal, Unbounded };

// Dense tableau: rows 0..m-1 are constraints, row m holds reduced costs, the
// last column holds the right-hand side (objective row: minus the objective).
class Tableau {
 public:
  Tableau(MatrixXd t, std::vector<Index> basis) : t_(std::move(t)), basis_(std::move(basis)) {}

  Index rows() const { return t_.rows() - 1; }
  Index rhs() const { return t_.cols() - 1; }
  MatrixXd& data() { return t_; }
  std::vector<Index>& basis() { return basis_; }

  void pivot(Index r, Index c) {
    t_.row(r) /= t_(r, c);
    for (Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Bland's rule over columns [0, allowed).
  PivotOutcome run(Index allowed) {
    constexpr int kMaxPivots = 200000;
    for (int it = 0; it < kMaxPivots; ++it) {
      Index enter = -1;
      for (Index j = 0; j < allowed; ++j) {
        if (t_(rows(), j) < -tol::kLpPivot) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return PivotOutcome::Optimal;
      Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < rows(); ++i) {
        const double a = t_(i, enter);
        if (a <= tol::kLpPivot) continue;
        const double ratio = t_(i, rhs()) / a;
        if (ratio < best ||
            (ratio == best && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return PivotOutcome::Unbounded;
      pivot(leave, enter);
    }
    throw std::runtime_error("solve_lp: pivot limit exceeded");
  }

 private:
  MatrixXd t_;
  std::vector<Index> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  check_dimensions(lp);
  StandardForm sf = to_standard_form(lp);
  const Index m = sf.a.rows(), n = sf.a.cols();
  for (Index i = 0; i < m; ++i) {
    if (sf.b[i] < 0.0) {
      sf.a.row(i) *= -1.0;
      sf.b[i] = -sf.b[i];
    }
  }

  // Phase 1: one artificial per row.
  MatrixXd t = MatrixXd::Zero(m + 1, n + m + 1);
  t.topLeftCorner(m, n) = sf.a;
  t.block(0, n, m, m).setIdentity();
  t.col(n + m).head(m) = sf.b;
  t.row(m).head(n) = -sf.a.colwise().sum();
  t(m, n + m) = -sf.b.sum();
  std::vector<Index> basis(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  Tableau tab(std::move(t), std::move(basis));
  tab.run(n);
  LpSolution out;
  const double infeasibility = -tab.data()(m, n + m);
  if (infeasibility > tol::kLpFeasibility * std::max(1.0, sf.b.lpNorm<Eigen::Infinity>())) {
    out.status = LpStatus::Infeasible;
    return out;
  }

  // Drive remaining artificials out; rows where that is impossible are redundant.
  std::vector<Index> keep;
  for (Index i = 0; i < m; ++i) {
    if (tab.basis()[static_cast<std::size_t>(i)] >= n) {
      Index col = -1;
      for (Index j = 0; j < n; ++j) {
        if (std::abs(tab.data()(i, j)) > tol::kLpPivot) {
          col = j;
          break;
        }
      }
      if (col < 0) continue;
      tab.pivot(i, col);
    }
    keep.push_back(i);
  }
  const Index m2 = static_cast<Index>(keep.size());
  MatrixXd t2(m2 + 1, n + 1);
  std::vector<Index> basis2(static_cast<std::size_t>(m2));
  for (Index r = 0; r < m2; ++r) {
    const Index i = keep[static_cast<std::size_t>(r)];
    t2.row(r).head(n) = tab.data().row(i).head(n);
    t2(r, n) = tab.data()(i, n + m);
    basis2[static_cast<std::size_t>(r)] = tab.basis()[static_cast<std::size_t>(i)];
  }
  // Phase 2 reduced costs for the original objective.
  t2.row(m2).head(n) = sf.c.transpose();
  t2(m2, n) = 0.0;
  for (Index r = 0; r < m2; ++r) {
    const double cb = sf.c[basis2[static_cast<std::size_t>(r)]];
    if (cb != 0.0) t2.row(m2) -= cb * t2.row(r);
  }

  Tableau phase2(std::move(t2), std::move(basis2));
  if (phase2.run(n) == PivotOutcome::Unbounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  VectorXd y = VectorXd::Zero(n);
  for (Index r = 0; r < m2; ++r) y[phase2.basis()[static_cast<std::size_t>(r)]] = phase2.data()(r, n);
  VectorXd x(lp.num_variables());
  for (Index j = 0; j < x.size(); ++j) {
    const auto& v = sf.map[static_cast<std::size_t>(j)];
    x[j] = v.offset + v.sign * y[v.col] - (v.col2 >= 0 ? y[v.col2] : 0.0);
  }
  out.status = LpStatus::Optimal;
  out.objective_value = lp.objective.dot(x);
  out.max_violation = constraint_violation(lp, x);
  out.x = std::move(x);
  return out;
}

LinearProgram build_inner_lp(const VectorXd& values, const ProbVector& pbar, double alpha, double beta,
                             Direction direction) {
  const Index n = pbar.size();
  if (values.size() != n) throw InvalidInput("build_inner_lp: values and pbar dimensions differ");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("build_inner_lp: alpha must be finite and >= 0");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidInput("build_inner_lp: beta must lie in [0, 1]");

  // Variable blocks: P1 = [0, n), P2 = [n, 2n), p = [2n, 3n).
  const double sign = direction == Direction::Min ? 1.0 : -1.0;
  LinearProgram lp = nonnegative_lp(VectorXd::Zero(3 * n));
  lp.objective.segment(2 * n, n) = sign * values;

  lp.eq_matrix = MatrixXd::Zero(n + 3, 3 * n);
  lp.eq_rhs = VectorXd::Zero(n + 3);
  for (Index block = 0; block < 3; ++block) {
    lp.eq_matrix.block(block, block * n, 1, n).setOnes();
    lp.eq_rhs[block] = 1.0;
  }
  for (Index i = 0; i < n; ++i) {
    lp.eq_matrix(3 + i, i) = beta;
    lp.eq_matrix(3 + i, n + i) = 1.0 - beta;
    lp.eq_matrix(3 + i, 2 * n + i) = -1.0;
  }

  lp.ub_matrix = MatrixXd::Zero(2 * n, 3 * n);
  lp.ub_rhs = VectorXd(2 * n);
  for (Index i = 0; i < n; ++i) {
    lp.ub_matrix(i, n + i) = 1.0;
    lp.ub_rhs[i] = pbar[i] + alpha;
    lp.ub_matrix(n + i, n + i) = -1.0;
    lp.ub_rhs[n + i] = alpha - pbar[i];
  }
  return lp;
}

}  // namespace privmdp
