#include "fairthresh/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairthresh/error.hpp"
#include "fairthresh/linalg.hpp"

namespace fairthresh::lp {

namespace {
constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-7;
constexpr double kReducedCostTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

void LpProblem::validate() const {
  const std::size_t n = objective.size();
  if (n == 0) throw ConfigError("lp: empty objective");
  auto check_finite = [](double v) {
    if (!std::isfinite(v)) throw ConfigError("lp: non-finite entry");
  };
  for (double v : objective) check_finite(v);
  if (eq_rows.size() != eq_rhs.size() || le_rows.size() != le_rhs.size()) {
    throw ConfigError("lp: row/rhs count mismatch");
  }
  for (const auto& row : eq_rows) {
    if (row.size() != n) throw ConfigError("lp: equality row width mismatch");
    for (double v : row) check_finite(v);
  }
  for (const auto& row : le_rows) {
    if (row.size() != n) throw ConfigError("lp: inequality row width mismatch");
    for (double v : row) check_finite(v);
  }
  for (double v : eq_rhs) check_finite(v);
  for (double v : le_rhs) check_finite(v);
  if (upper.size() != n) throw ConfigError("lp: upper bound size mismatch");
  for (double v : upper) {
    check_finite(v);
    if (v < 0.0) throw ConfigError("lp: negative upper bound");
  }
}

nlohmann::json LpProblem::to_json() const {
  return {{"objective", objective},
          {"eq", {{"rows", eq_rows}, {"rhs", eq_rhs}}},
          {"le", {{"rows", le_rows}, {"rhs", le_rhs}}},
          {"upper", upper}};
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

bool feasible(const LpProblem& problem, const std::vector<double>& x,
              double eq_tol, double bound_tol) {
  const std::size_t n = problem.num_vars();
  if (x.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] < -bound_tol || x[i] > problem.upper[i] + bound_tol) return false;
  }
  for (std::size_t r = 0; r < problem.eq_rows.size(); ++r) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += problem.eq_rows[r][i] * x[i];
    if (std::abs(v - problem.eq_rhs[r]) > eq_tol) return false;
  }
  for (std::size_t r = 0; r < problem.le_rows.size(); ++r) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += problem.le_rows[r][i] * x[i];
    if (v > problem.le_rhs[r] + eq_tol) return false;
  }
  return true;
}

namespace {

enum class VarState { basic, at_lower, at_upper };

struct Tableau {
  std::size_t n_struct = 0;
  std::size_t n_total = 0;
  std::size_t m = 0;
  std::size_t first_artificial = 0;
  std::vector<std::vector<double>> cols;  // per variable, length m
  std::vector<double> rhs;                // length m, >= 0 after normalize
  std::vector<double> cost;               // length n_total
  std::vector<double> upper;              // length n_total (can be +inf)
  std::vector<VarState> state;
  std::vector<std::size_t> basis;         // length m
};

Tableau build(const LpProblem& p) {
  const std::size_t n = p.num_vars();
  const std::size_t me = p.eq_rows.size();
  const std::size_t mu = p.le_rows.size();
  const std::size_t m = me + mu;

  Tableau t;
  t.n_struct = n;
  t.m = m;

  // Dense row matrix [eq; le] and rhs, sign-normalized to rhs >= 0.
  std::vector<std::vector<double>> rows(m, std::vector<double>(n, 0.0));
  std::vector<double> b(m, 0.0);
  std::vector<double> slack_sign(m, 0.0);  // 0 for eq rows
  for (std::size_t r = 0; r < me; ++r) {
    rows[r] = p.eq_rows[r];
    b[r] = p.eq_rhs[r];
  }
  for (std::size_t r = 0; r < mu; ++r) {
    rows[me + r] = p.le_rows[r];
    b[me + r] = p.le_rhs[r];
    slack_sign[me + r] = 1.0;
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (b[r] < 0.0) {
      for (double& v : rows[r]) v = -v;
      b[r] = -b[r];
      slack_sign[r] = -slack_sign[r];
    }
  }

  double scale = 1.0;
  for (double v : p.objective) scale = std::max(scale, std::abs(v));
  for (const auto& row : rows) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  for (double v : b) scale = std::max(scale, std::abs(v));
  const double big_m = 1e7 * scale;

  // Variables: structurals, slacks, then one artificial per row that lacks
  // an identity slack column.
  std::vector<std::size_t> art_rows;
  for (std::size_t r = 0; r < m; ++r) {
    if (slack_sign[r] <= 0.0) art_rows.push_back(r);
  }
  t.first_artificial = n + mu;
  t.n_total = n + mu + art_rows.size();
  t.cols.assign(t.n_total, std::vector<double>(m, 0.0));
  t.cost.assign(t.n_total, 0.0);
  t.upper.assign(t.n_total, kInf);
  t.state.assign(t.n_total, VarState::at_lower);
  t.rhs = b;

  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t r = 0; r < m; ++r) t.cols[j][r] = rows[r][j];
    t.cost[j] = p.objective[j];
    t.upper[j] = p.upper[j];
  }
  for (std::size_t r = 0; r < mu; ++r) {
    t.cols[n + r][me + r] = slack_sign[me + r];
  }
  for (std::size_t i = 0; i < art_rows.size(); ++i) {
    t.cols[t.first_artificial + i][art_rows[i]] = 1.0;
    t.cost[t.first_artificial + i] = big_m;
  }

  // Initial basis: slack where its sign is +1, artificial otherwise.
  t.basis.assign(m, 0);
  std::size_t art = 0;
  for (std::size_t r = 0; r < m; ++r) {
    if (slack_sign[r] > 0.0) {
      t.basis[r] = n + (r - me);
    } else {
      t.basis[r] = t.first_artificial + art++;
    }
    t.state[t.basis[r]] = VarState::basic;
  }
  return t;
}

std::vector<double> basic_values(const Tableau& t) {
  linalg::Matrix basis_mat(t.m, std::vector<double>(t.m, 0.0));
  std::vector<double> rhs = t.rhs;
  for (std::size_t i = 0; i < t.m; ++i) {
    const auto& col = t.cols[t.basis[i]];
    for (std::size_t r = 0; r < t.m; ++r) basis_mat[r][i] = col[r];
  }
  for (std::size_t j = 0; j < t.n_total; ++j) {
    if (t.state[j] != VarState::at_upper) continue;
    for (std::size_t r = 0; r < t.m; ++r) rhs[r] -= t.cols[j][r] * t.upper[j];
  }
  auto xb = linalg::solve_dense(basis_mat, rhs);
  if (!xb) throw Error("simplex: singular basis matrix");
  return *xb;
}

std::vector<double> duals(const Tableau& t) {
  linalg::Matrix bt(t.m, std::vector<double>(t.m, 0.0));
  std::vector<double> cb(t.m, 0.0);
  for (std::size_t i = 0; i < t.m; ++i) {
    const auto& col = t.cols[t.basis[i]];
    for (std::size_t r = 0; r < t.m; ++r) bt[i][r] = col[r];  // transpose
    cb[i] = t.cost[t.basis[i]];
  }
  auto y = linalg::solve_dense(bt, cb);
  if (!y) throw Error("simplex: singular basis matrix");
  return *y;
}

std::vector<double> solve_with_basis(const Tableau& t,
                                     const std::vector<double>& col) {
  linalg::Matrix basis_mat(t.m, std::vector<double>(t.m, 0.0));
  for (std::size_t i = 0; i < t.m; ++i) {
    for (std::size_t r = 0; r < t.m; ++r) basis_mat[r][i] = t.cols[t.basis[i]][r];
  }
  auto w = linalg::solve_dense(basis_mat, col);
  if (!w) throw Error("simplex: singular basis matrix");
  return *w;
}

}  // namespace

LpSolution solve(const LpProblem& problem) {
  problem.validate();
  Tableau t = build(problem);

  const std::size_t max_iter = 2000 + 200 * (t.n_total + t.m);
  std::size_t iter = 0;
  for (;; ++iter) {
    if (iter > max_iter) throw Error("simplex: iteration limit exceeded");

    const std::vector<double> xb = basic_values(t);
    const std::vector<double> y = duals(t);

    // Bland: entering variable is the lowest-index improving candidate.
    // Artificials never re-enter once they have left the basis.
    std::size_t enter = t.n_total;
    double d_enter = 0.0;
    for (std::size_t j = 0; j < t.first_artificial; ++j) {
      if (t.state[j] == VarState::basic) continue;
      double d = t.cost[j];
      for (std::size_t r = 0; r < t.m; ++r) d -= y[r] * t.cols[j][r];
      if ((t.state[j] == VarState::at_lower && d < -kReducedCostTol) ||
          (t.state[j] == VarState::at_upper && d > kReducedCostTol)) {
        enter = j;
        d_enter = d;
        break;
      }
    }

    if (enter == t.n_total) {
      // Optimal for the Big-M program; a positive artificial means the
      // original constraints cannot be met.
      for (std::size_t i = 0; i < t.m; ++i) {
        if (t.basis[i] >= t.first_artificial && xb[i] > kFeasTol) {
          return {{}, 0.0, LpStatus::infeasible};
        }
      }
      std::vector<double> x(t.n_struct, 0.0);
      for (std::size_t j = 0; j < t.n_struct; ++j) {
        if (t.state[j] == VarState::at_upper) x[j] = t.upper[j];
      }
      for (std::size_t i = 0; i < t.m; ++i) {
        if (t.basis[i] < t.n_struct) x[t.basis[i]] = xb[i];
      }
      double obj = 0.0;
      for (std::size_t j = 0; j < t.n_struct; ++j) {
        x[j] = std::clamp(x[j], 0.0, problem.upper[j]);
        obj += problem.objective[j] * x[j];
      }
      return {std::move(x), obj, LpStatus::optimal};
    }

    const double sigma = t.state[enter] == VarState::at_lower ? 1.0 : -1.0;
    const std::vector<double> w = solve_with_basis(t, t.cols[enter]);

    // Ratio test: smallest step that drives a basic variable to one of its
    // bounds, or lets the entering variable flip to its opposite bound.
    double step = t.upper[enter];  // may be +inf
    std::size_t leave_pos = t.m;   // t.m means bound flip
    std::size_t leave_var = enter;
    VarState leave_to = VarState::at_lower;
    for (std::size_t i = 0; i < t.m; ++i) {
      const double g = sigma * w[i];  // basic value moves by -g * step
      const std::size_t vb = t.basis[i];
      double limit = kInf;
      VarState target = VarState::at_lower;
      if (g > kPivotTol) {
        limit = std::max(xb[i], 0.0) / g;
        target = VarState::at_lower;
      } else if (g < -kPivotTol && std::isfinite(t.upper[vb])) {
        limit = std::max(t.upper[vb] - xb[i], 0.0) / (-g);
        target = VarState::at_upper;
      } else {
        continue;
      }
      if (limit < step - kPivotTol ||
          (limit < step + kPivotTol && vb < leave_var)) {
        step = limit;
        leave_pos = i;
        leave_var = vb;
        leave_to = target;
      }
    }

    if (!std::isfinite(step)) return {{}, 0.0, LpStatus::unbounded};
    (void)d_enter;

    if (leave_pos == t.m) {
      // Bound flip, basis unchanged.
      t.state[enter] = t.state[enter] == VarState::at_lower
                           ? VarState::at_upper
                           : VarState::at_lower;
      continue;
    }
    t.state[t.basis[leave_pos]] = leave_to;
    t.basis[leave_pos] = enter;
    t.state[enter] = VarState::basic;
  }
}

namespace {

// Next k-combination of indices in [0, count); returns false when exhausted.
bool next_combination(std::vector<std::size_t>& idx, std::size_t count) {
  const std::size_t k = idx.size();
  std::size_t i = k;
  while (i-- > 0) {
    if (idx[i] < count - (k - i)) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

LpSolution brute_force_oracle(const LpProblem& problem) {
  problem.validate();
  const std::size_t n = problem.num_vars();
  if (problem.num_rows() + n > 20) {
    throw OracleTooLargeError(
        "brute-force LP oracle limited to rows + vars <= 20");
  }

  // Candidate active rows beyond the always-active equalities: inequality
  // rows at equality and single-variable bound rows.
  struct Row {
    std::vector<double> coef;
    double rhs;
  };
  std::vector<Row> optional_rows;
  for (std::size_t r = 0; r < problem.le_rows.size(); ++r) {
    optional_rows.push_back({problem.le_rows[r], problem.le_rhs[r]});
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> lo(n, 0.0), hi(n, 0.0);
    lo[i] = 1.0;
    hi[i] = 1.0;
    optional_rows.push_back({lo, 0.0});
    optional_rows.push_back({hi, problem.upper[i]});
  }

  const std::size_t me = problem.eq_rows.size();
  const std::size_t need = me < n ? n - me : 0;
  if (need > optional_rows.size()) return {{}, 0.0, LpStatus::infeasible};

  bool found = false;
  LpSolution best;
  best.status = LpStatus::infeasible;

  std::vector<std::size_t> pick(need);
  for (std::size_t i = 0; i < need; ++i) pick[i] = i;
  bool more = true;
  if (need == 0) more = true;
  while (more) {
    linalg::Matrix a;
    std::vector<double> b;
    for (std::size_t r = 0; r < std::min(me, n); ++r) {
      a.push_back(problem.eq_rows[r]);
      b.push_back(problem.eq_rhs[r]);
    }
    for (std::size_t i = 0; i < need; ++i) {
      a.push_back(optional_rows[pick[i]].coef);
      b.push_back(optional_rows[pick[i]].rhs);
    }
    if (a.size() == n) {
      if (auto x = linalg::solve_dense(a, b)) {
        if (feasible(problem, *x, 1e-8, 1e-8)) {
          double obj = 0.0;
          for (std::size_t i = 0; i < n; ++i) obj += problem.objective[i] * (*x)[i];
          if (!found || obj < best.objective_value) {
            found = true;
            best = {*x, obj, LpStatus::optimal};
          }
        }
      }
    }
    if (need == 0) break;
    more = next_combination(pick, optional_rows.size());
  }
  return best;
}

}  // namespace fairthresh::lp
