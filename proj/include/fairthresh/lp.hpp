#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace fairthresh::lp {

// minimize c'x  s.t.  Ae x = be,  Au x <= bu,  0 <= x <= u
// Upper bounds are finite and handled natively by the solver.
struct LpProblem {
  std::vector<double> objective;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> le_rows;
  std::vector<double> le_rhs;
  std::vector<double> upper;

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return eq_rows.size() + le_rows.size(); }
  void validate() const;  // throws ConfigError on dimension/value problems

  nlohmann::json to_json() const;
};

enum class LpStatus { optimal, infeasible, unbounded };

std::string to_string(LpStatus s);

struct LpSolution {
  std::vector<double> x;
  double objective_value = 0.0;
  LpStatus status = LpStatus::infeasible;
};

// Bounded-variable primal simplex with Bland's rule and Big-M artificials.
// Deterministic: identical input yields an identical solution.
LpSolution solve(const LpProblem& problem);

// Exact optimum by enumerating basic solutions (active-set subsets).
// Test oracle only; guarded to rows + vars <= 20.
LpSolution brute_force_oracle(const LpProblem& problem);

// True iff x satisfies every constraint: Ae x = be within eq_tol,
// Au x <= bu + eq_tol, and -bound_tol <= x <= u + bound_tol.
bool feasible(const LpProblem& problem, const std::vector<double>& x,
              double eq_tol = 1e-7, double bound_tol = 1e-9);

}  // namespace fairthresh::lp
