#include "privmdp/validation/oracles.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace privmdp::oracle {

std::optional<double> lp_vertex_enumeration(const LinearProgram& lp, double feasibility) {
  const Index n = lp.num_variables();

  // Independent subset of the equality rows.
  MatrixXd eq(0, n);
  VectorXd eq_rhs(0);
  for (Index i = 0; i < lp.eq_matrix.rows(); ++i) {
    MatrixXd trial(eq.rows() + 1, n);
    trial << eq, lp.eq_matrix.row(i);
    if (Eigen::FullPivLU<MatrixXd>(trial).rank() == trial.rows()) {
      eq = trial;
      eq_rhs.conservativeResize(eq_rhs.size() + 1);
      eq_rhs[eq_rhs.size() - 1] = lp.eq_rhs[i];
    }
  }

  // Inequalities a'x <= b, including finite bounds.
  std::vector<VectorXd> rows;
  std::vector<double> rhs;
  for (Index i = 0; i < lp.ub_matrix.rows(); ++i) {
    rows.emplace_back(lp.ub_matrix.row(i).transpose());
    rhs.push_back(lp.ub_rhs[i]);
  }
  for (Index j = 0; j < n; ++j) {
    if (std::isfinite(lp.lower[j])) {
      rows.emplace_back(-VectorXd::Unit(n, j));
      rhs.push_back(-lp.lower[j]);
    }
    if (std::isfinite(lp.upper[j])) {
      rows.emplace_back(VectorXd::Unit(n, j));
      rhs.push_back(lp.upper[j]);
    }
  }

  const Index need = n - eq.rows();
  const auto total = static_cast<Index>(rows.size());
  std::optional<double> best;
  if (need < 0 || need > total) return best;

  std::vector<Index> pick(static_cast<std::size_t>(need));
  std::function<void(Index, Index)> choose = [&](Index depth, Index from) {
    if (depth == need) {
      MatrixXd a(n, n);
      VectorXd b(n);
      a.topRows(eq.rows()) = eq;
      b.head(eq.rows()) = eq_rhs;
      for (Index r = 0; r < need; ++r) {
        a.row(eq.rows() + r) = rows[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].transpose();
        b[eq.rows() + r] = rhs[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])];
      }
      Eigen::FullPivLU<MatrixXd> lu(a);
      if (lu.rank() < n) return;
      const VectorXd x = lu.solve(b);
      if (lp.eq_matrix.rows() > 0 && (lp.eq_matrix * x - lp.eq_rhs).cwiseAbs().maxCoeff() > feasibility) return;
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].dot(x) > rhs[r] + feasibility) return;
      const double value = lp.objective.dot(x);
      if (!best || value < *best) best = value;
      return;
    }
    for (Index i = from; i <= total - (need - depth); ++i) {
      pick[static_cast<std::size_t>(depth)] = i;
      choose(depth + 1, i + 1);
    }
  };
  choose(0, 0);
  return best;
}

VectorXd trajectory_expectation(const Mdp& m, const Policy& pi) {
  const int T = m.horizon().steps();
  const double gamma = m.discount();
  VectorXd out = VectorXd::Zero(m.num_states());
  std::function<void(Index, Index, int, double, double, double)> walk = [&](Index start, Index s, int t, double prob,
                                                                           double discount, double collected) {
    if (t == T) {
      out[start] += prob * (collected + discount * m.terminal()[s]);
      return;
    }
    const VectorXd& rule = pi.rule(t);
    for (Index a = 0; a < m.num_actions(s); ++a) {
      const Index sa = m.pair(s, a);
      const double pa = rule[sa];
      if (pa == 0.0) continue;
      for (Index next = 0; next < m.num_states(); ++next) {
        const double ps = m.kernel()(sa, next);
        if (ps == 0.0) continue;
        walk(start, next, t + 1, prob * pa * ps, discount * gamma, collected + discount * m.rewards()[sa]);
      }
    }
  };
  for (Index s = 0; s < m.num_states(); ++s) walk(s, s, 0, 1.0, 1.0, 0.0);
  return out;
}

VectorXd linear_solve_value(const Mdp& m, const Policy& pi) {
  const Index n = m.num_states();
  MatrixXd p_pi = MatrixXd::Zero(n, n);
  VectorXd r_pi = VectorXd::Zero(n);
  const VectorXd& rule = pi.rule(0);
  for (Index s = 0; s < n; ++s) {
    for (Index a = 0; a < m.num_actions(s); ++a) {
      const Index sa = m.pair(s, a);
      p_pi.row(s) += rule[sa] * m.kernel().row(sa);
      r_pi[s] += rule[sa] * m.rewards()[sa];
    }
  }
  const MatrixXd system = MatrixXd::Identity(n, n) - m.discount() * p_pi;
  return system.partialPivLu().solve(r_pi);
}

VectorXd best_deterministic_value(const Mdp& m) {
  const int T = m.horizon().steps();
  const Index n = m.num_states();
  const auto slots = static_cast<std::size_t>(T) * static_cast<std::size_t>(n);
  std::vector<Index> choice(slots, 0);
  VectorXd best = VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  for (;;) {
    VectorXd v = m.terminal();
    for (int t = T - 1; t >= 0; --t) {
      VectorXd prev(n);
      for (Index s = 0; s < n; ++s) {
        const Index sa = m.pair(s, choice[static_cast<std::size_t>(t) * static_cast<std::size_t>(n) + static_cast<std::size_t>(s)]);
        double next = 0.0;
        for (Index j = 0; j < n; ++j) next += m.kernel()(sa, j) * v[j];
        prev[s] = m.rewards()[sa] + m.discount() * next;
      }
      v = prev;
    }
    best = best.cwiseMax(v);

    std::size_t slot = 0;
    for (; slot < slots; ++slot) {
      const auto s = static_cast<Index>(slot % static_cast<std::size_t>(n));
      if (++choice[slot] < m.num_actions(s)) break;
      choice[slot] = 0;
    }
    if (slot == slots) break;
  }
  return best;
}

GridBounds grid_search_bounds(const Mdp& mbar, const Policy& pi, double alpha, double beta, double resolution) {
  if (mbar.num_states() != 2) throw InvalidInput("grid_search_bounds: two-state models only");
  const int T = mbar.horizon().steps();
  auto grid = [&](double lo, double hi) {
    std::vector<double> pts;
    const int steps = std::max(1, static_cast<int>(std::ceil((hi - lo) / resolution - 1e-12)));
    for (int i = 0; i <= steps; ++i) pts.push_back(lo + (hi - lo) * i / steps);
    return pts;
  };
  const std::vector<double> ys = grid(0.0, 1.0);

  auto extremum = [&](const VectorXd& v, Index sa, bool minimize) {
    const double p0 = mbar.kernel()(sa, 0);
    const std::vector<double> zs = grid(std::max(p0 - alpha, 0.0), std::min(p0 + alpha, 1.0));
    double best = minimize ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    for (double y : ys) {
      for (double z : zs) {
        const double x = beta * y + (1.0 - beta) * z;
        const double value = x * v[0] + (1.0 - x) * v[1];
        best = minimize ? std::min(best, value) : std::max(best, value);
      }
    }
    return best;
  };

  VectorXd lower = mbar.terminal(), upper = mbar.terminal();
  for (int t = T - 1; t >= 0; --t) {
    VectorXd lo_prev = VectorXd::Zero(2), hi_prev = VectorXd::Zero(2);
    const VectorXd& rule = pi.rule(t);
    for (Index s = 0; s < 2; ++s) {
      for (Index a = 0; a < mbar.num_actions(s); ++a) {
        const Index sa = mbar.pair(s, a);
        lo_prev[s] += rule[sa] * (mbar.rewards()[sa] + mbar.discount() * extremum(lower, sa, true));
        hi_prev[s] += rule[sa] * (mbar.rewards()[sa] + mbar.discount() * extremum(upper, sa, false));
      }
    }
    lower = lo_prev;
    upper = hi_prev;
  }
  return {lower, upper};
}

}  // namespace privmdp::oracle
