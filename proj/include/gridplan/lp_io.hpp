#pragma once

#include <string>

#include "gridplan/ip_builder.hpp"
#include "gridplan/solver.hpp"

namespace gridplan {

// CPLEX LP text for the model: merged weighted objective, rows named c0..cN
// in insertion order, explicit bounds for integers and capped continuous
// variables. Deterministic: expression terms and the Bounds, Generals and
// Binaries sections are sorted by variable name, so exporting an imported
// model reproduces the text byte for byte.
std::string export_lp(const MilpModel& model);

// Parses text produced by export_lp (or equivalent). The result has no
// BuildContext and a single objective group named "imported".
MilpModel import_lp(const std::string& text);

// Parses a solver solution file. Accepts two formats:
//  - the adapter format: optional '#' comments, '=status= <STATUS>',
//    optional '=bound= <value>', then '<name> <value>' lines;
//  - HiGHS native .sol files ("Model status" / "# Columns N").
// The objective is re-evaluated from the parsed values; missing variables
// default to zero.
Solution parse_solution_text(const std::string& text, const MilpModel& model);

// Plain-number formatting shared by the LP writer: integers without decimal
// point, everything else with up to 12 significant digits.
std::string lp_number(double v);

}  // namespace gridplan
