#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "gridplan/ip_builder.hpp"

namespace gridplan {

enum class SolveStatus { Optimal, Feasible, Infeasible, TimeLimit };

std::string to_string(SolveStatus status);
SolveStatus solve_status_from_string(const std::string& s);

struct SolveParams {
  double time_limit_s = 600.0;
  // Relative MIP gap at which the search may stop. The builtin solver proves
  // optimality by exhaustion, so its default is exact.
  double gap_tolerance = 0.0;
  std::uint64_t seed = 0;
  // The builtin branch-and-bound refuses models with more binaries than this.
  int binary_budget = 4000;
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  std::map<std::string, double> values;  // variable name -> value
  double objective = 0.0;
  double bound = 0.0;
  double wall_time_s = 0.0;
  long long nodes = 0;  // builtin only
};

// Command template for the external solver; {lp}, {sol}, {time_limit} and
// {gap} are substituted. GRIDPLAN_SOLVER_CMD overrides the built-in default,
// which runs the bundled LP adapter script.
std::string default_solver_command();

// Exports the model, runs the external command, parses the solution file and
// re-evaluates the objective from the returned variable values.
Solution solve_external(const MilpModel& model, const SolveParams& params,
                        const std::string& solver_command = "");

// Exact depth-first branch-and-bound over the structural binaries. Requires
// the model's BuildContext; throws InvalidModel for imported models and
// BudgetExceeded when the binary count exceeds params.binary_budget.
Solution solve_builtin(const MilpModel& model, const SolveParams& params);

}  // namespace gridplan
