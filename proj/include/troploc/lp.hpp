#pragma once

// Dense two-phase primal simplex with Bland's anti-cycling rule. Meant for the
// small exact programs of the location solvers (a few hundred rows at most).

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "troploc/core.hpp"

namespace troploc {

class LpInfeasible : public NumericError {
 public:
  LpInfeasible() : NumericError("linear program is infeasible") {}
};

class LpUnbounded : public NumericError {
 public:
  LpUnbounded() : NumericError("linear program is unbounded") {}
};

struct VarBound {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();

  static VarBound free() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
};

/// minimize objective . x  s.t.  ineq_lhs x <= ineq_rhs,  eq_lhs x == eq_rhs,  bounds.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> ineq_lhs;
  std::vector<double> ineq_rhs;
  std::vector<std::vector<double>> eq_lhs;
  std::vector<double> eq_rhs;
  std::vector<VarBound> bounds;  // one per variable

  explicit LinearProgram(std::size_t num_vars = 0, VarBound b = {})
      : objective(num_vars, 0.0), bounds(num_vars, b) {}

  std::size_t num_vars() const { return objective.size(); }

  void add_le(std::vector<double> row, double rhs) {
    ineq_lhs.push_back(std::move(row));
    ineq_rhs.push_back(rhs);
  }
  void add_eq(std::vector<double> row, double rhs) {
    eq_lhs.push_back(std::move(row));
    eq_rhs.push_back(rhs);
  }

  void validate() const {
    const std::size_t n = num_vars();
    if (n == 0) throw InputError("linear program has no variables");
    if (bounds.size() != n) throw InputError("linear program needs one bound per variable");
    if (ineq_lhs.size() != ineq_rhs.size() || eq_lhs.size() != eq_rhs.size()) {
      throw InputError("linear program rows and right-hand sides disagree");
    }
    for (const auto& r : ineq_lhs) {
      if (r.size() != n) throw InputError("linear program row has the wrong width");
    }
    for (const auto& r : eq_lhs) {
      if (r.size() != n) throw InputError("linear program row has the wrong width");
    }
    for (const auto& b : bounds) {
      if (b.lower > b.upper || b.lower == std::numeric_limits<double>::infinity() ||
          b.upper == -std::numeric_limits<double>::infinity()) {
        throw InputError("linear program has an empty variable bound");
      }
    }
  }
};

struct LpSolution {
  double value = 0.0;
  std::vector<double> x;
  std::size_t pivots = 0;
};

namespace detail {

class SimplexTableau {
 public:
  static constexpr double kPivotEps = 1e-9;

  // Rows are equalities sum_j a_rj y_j (+ slack) = b_r over y >= 0.
  SimplexTableau(std::vector<std::vector<double>> rows, std::vector<double> rhs, std::vector<bool> has_slack,
                 std::size_t num_structural)
      : num_structural_(num_structural) {
    const std::size_t R = rows.size();
    std::size_t num_slack = 0;
    for (bool s : has_slack) num_slack += s ? 1 : 0;
    first_artificial_ = num_structural + num_slack;

    // Decide which rows need an artificial column.
    std::vector<int> slack_col(R, -1);
    std::size_t next_slack = num_structural;
    std::size_t num_art = 0;
    std::vector<bool> needs_art(R, false);
    std::vector<double> sign(R, 1.0);
    for (std::size_t r = 0; r < R; ++r) {
      if (has_slack[r]) slack_col[r] = static_cast<int>(next_slack++);
      if (rhs[r] < 0.0) sign[r] = -1.0;
      needs_art[r] = !(has_slack[r] && sign[r] > 0.0);
      if (needs_art[r]) ++num_art;
    }
    cols_ = first_artificial_ + num_art;
    table_.assign(R, std::vector<double>(cols_ + 1, 0.0));
    basis_.assign(R, 0);
    std::size_t next_art = first_artificial_;
    for (std::size_t r = 0; r < R; ++r) {
      auto& row = table_[r];
      for (std::size_t j = 0; j < num_structural; ++j) row[j] = sign[r] * rows[r][j];
      if (slack_col[r] >= 0) row[static_cast<std::size_t>(slack_col[r])] = sign[r];
      row[cols_] = sign[r] * rhs[r];
      if (needs_art[r]) {
        row[next_art] = 1.0;
        basis_[r] = next_art++;
      } else {
        basis_[r] = static_cast<std::size_t>(slack_col[r]);
      }
    }
  }

  std::size_t pivots() const { return pivots_; }

  void phase_one() {
    std::vector<double> cost(cols_, 0.0);
    for (std::size_t j = first_artificial_; j < cols_; ++j) cost[j] = 1.0;
    if (first_artificial_ == cols_) return;
    optimize(cost, cols_);
    double infeas = 0.0;
    double scale = 1.0;
    for (std::size_t r = 0; r < table_.size(); ++r) {
      scale = std::max(scale, std::abs(table_[r][cols_]));
      if (basis_[r] >= first_artificial_) infeas += table_[r][cols_];
    }
    if (infeas > 1e-7 * scale) throw LpInfeasible();
    // Drive zero-level artificials out of the basis; drop redundant rows.
    for (std::size_t r = 0; r < table_.size();) {
      if (basis_[r] < first_artificial_) {
        ++r;
        continue;
      }
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (std::abs(table_[r][j]) > kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) {
        table_.erase(table_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        continue;
      }
      pivot(r, enter);
      ++r;
    }
  }

  void phase_two(const std::vector<double>& structural_cost) {
    std::vector<double> cost(cols_, 0.0);
    for (std::size_t j = 0; j < structural_cost.size(); ++j) cost[j] = structural_cost[j];
    optimize(cost, first_artificial_);
  }

  std::vector<double> structural_values() const {
    std::vector<double> y(num_structural_, 0.0);
    for (std::size_t r = 0; r < table_.size(); ++r) {
      if (basis_[r] < num_structural_) y[basis_[r]] = table_[r][cols_];
    }
    return y;
  }

 private:
  // Bland's rule: lowest-index improving column, lowest-index leaving variable on ratio ties.
  void optimize(const std::vector<double>& cost, std::size_t allowed_cols) {
    const std::size_t max_pivots = 200000;
    while (true) {
      std::size_t enter = allowed_cols;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        double d = cost[j];
        for (std::size_t r = 0; r < table_.size(); ++r) d -= cost[basis_[r]] * table_[r][j];
        if (d < -kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter == allowed_cols) return;

      std::size_t leave = table_.size();
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < table_.size(); ++r) {
        const double a = table_[r][enter];
        if (a <= kPivotEps) continue;
        const double ratio = table_[r][cols_] / a;
        if (leave == table_.size() || ratio < best_ratio - kPivotEps) {
          best_ratio = ratio;
          leave = r;
        } else if (ratio <= best_ratio + kPivotEps && basis_[r] < basis_[leave]) {
          best_ratio = std::min(best_ratio, ratio);
          leave = r;
        }
      }
      if (leave == table_.size()) throw LpUnbounded();
      pivot(leave, enter);
      if (pivots_ > max_pivots) throw NumericError("simplex exceeded the pivot limit");
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    auto& prow = table_[r];
    const double p = prow[c];
    for (double& v : prow) v /= p;
    prow[c] = 1.0;
    for (std::size_t i = 0; i < table_.size(); ++i) {
      if (i == r) continue;
      auto& row = table_[i];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    basis_[r] = c;
    ++pivots_;
  }

  std::size_t num_structural_ = 0;
  std::size_t first_artificial_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::vector<double>> table_;  // last column is the right-hand side
  std::vector<std::size_t> basis_;
  std::size_t pivots_ = 0;
};

}  // namespace detail

/// Solves the program exactly up to floating point; throws LpInfeasible or LpUnbounded.
inline LpSolution simplex_solve(const LinearProgram& lp) {
  lp.validate();
  const std::size_t n = lp.num_vars();
  constexpr double inf = std::numeric_limits<double>::infinity();

  // x_j = offset_j + plus_j * y[pos] - (minus ? y[neg] : 0), y >= 0.
  enum class Map { Shift, Mirror, Split };
  struct VarMap {
    Map kind;
    double offset;
    std::size_t pos;
    std::size_t neg;
  };
  std::vector<VarMap> maps(n);
  std::size_t ny = 0;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<bool> has_slack;
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (y index, bound)
  for (std::size_t j = 0; j < n; ++j) {
    const auto& b = lp.bounds[j];
    if (b.lower > -inf) {
      maps[j] = {Map::Shift, b.lower, ny++, 0};
      if (b.upper < inf) upper_rows.emplace_back(maps[j].pos, b.upper - b.lower);
    } else if (b.upper < inf) {
      maps[j] = {Map::Mirror, b.upper, ny++, 0};
    } else {
      maps[j] = {Map::Split, 0.0, ny, ny + 1};
      ny += 2;
    }
  }

  auto translate = [&](const std::vector<double>& a, double b, bool slack) {
    std::vector<double> row(ny, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const auto& m = maps[j];
      switch (m.kind) {
        case Map::Shift:
          row[m.pos] += a[j];
          b -= a[j] * m.offset;
          break;
        case Map::Mirror:
          row[m.pos] -= a[j];
          b -= a[j] * m.offset;
          break;
        case Map::Split:
          row[m.pos] += a[j];
          row[m.neg] -= a[j];
          break;
      }
    }
    rows.push_back(std::move(row));
    rhs.push_back(b);
    has_slack.push_back(slack);
  };
  for (std::size_t i = 0; i < lp.ineq_lhs.size(); ++i) translate(lp.ineq_lhs[i], lp.ineq_rhs[i], true);
  for (std::size_t i = 0; i < lp.eq_lhs.size(); ++i) translate(lp.eq_lhs[i], lp.eq_rhs[i], false);
  for (const auto& [pos, ub] : upper_rows) {
    std::vector<double> row(ny, 0.0);
    row[pos] = 1.0;
    rows.push_back(std::move(row));
    rhs.push_back(ub);
    has_slack.push_back(true);
  }

  std::vector<double> cost(ny, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& m = maps[j];
    const double c = lp.objective[j];
    switch (m.kind) {
      case Map::Shift:
        cost[m.pos] += c;
        break;
      case Map::Mirror:
        cost[m.pos] -= c;
        break;
      case Map::Split:
        cost[m.pos] += c;
        cost[m.neg] -= c;
        break;
    }
  }

  LpSolution sol;
  if (rows.empty()) {
    // Only sign constraints: optimum at the bounds unless some cost pulls to infinity.
    for (double c : cost) {
      if (c < 0.0) throw LpUnbounded();
    }
    sol.x.resize(n);
    for (std::size_t j = 0; j < n; ++j) sol.x[j] = maps[j].kind == Map::Split ? 0.0 : maps[j].offset;
  } else {
    detail::SimplexTableau tab(std::move(rows), std::move(rhs), std::move(has_slack), ny);
    tab.phase_one();
    tab.phase_two(cost);
    const auto y = tab.structural_values();
    sol.pivots = tab.pivots();
    sol.x.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto& m = maps[j];
      switch (m.kind) {
        case Map::Shift: sol.x[j] = m.offset + y[m.pos]; break;
        case Map::Mirror: sol.x[j] = m.offset - y[m.pos]; break;
        case Map::Split: sol.x[j] = y[m.pos] - y[m.neg]; break;
      }
    }
  }
  sol.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.value += lp.objective[j] * sol.x[j];
  return sol;
}

}  // namespace troploc
