#include "gridplan/common.hpp"
#include "gridplan/solver.hpp"

namespace gridplan {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "OPTIMAL";
    case SolveStatus::Feasible: return "FEASIBLE";
    case SolveStatus::Infeasible: return "INFEASIBLE";
    default: return "TIMELIMIT";
  }
}

SolveStatus solve_status_from_string(const std::string& s) {
  if (s == "OPTIMAL") return SolveStatus::Optimal;
  if (s == "FEASIBLE") return SolveStatus::Feasible;
  if (s == "INFEASIBLE") return SolveStatus::Infeasible;
  if (s == "TIMELIMIT") return SolveStatus::TimeLimit;
  throw ParseError("unknown solver status '" + s + "'");
}

std::string default_solver_command() {
  return "python3 " GRIDPLAN_TOOLS_DIR
         "/solve_lp.py --lp {lp} --out {sol} --time-limit {time_limit} --gap {gap}";
}

}  // namespace gridplan
