#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridplan/grid.hpp"
#include "gridplan/layout.hpp"
#include "gridplan/scene_graph.hpp"

namespace gridplan {

struct CoarseHint;

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;  // first counterexample, empty when passing
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool ok = true;

  const CheckResult* find(const std::string& name) const;
};

// Re-verifies a layout with direct combinatorial procedures, never through
// the MILP. Checks run in a fixed order: label totality, furniture shape,
// containment, overlap, corridor connectivity, room accessibility, adjacency,
// corner ownership, against-wall, alignment, facing.
ValidationReport check_layout(const SceneGraph& sg, const Grid& grid,
                              const Layout& layout);

// Closed-form objective terms recomputed from the layout alone, keyed by term
// name plus "total_weighted". Bounding boxes are re-optimised the same way a
// solver would pick them, so totals are comparable to solver objectives.
// `hint` adds the coarse-deviation term.
std::map<std::string, double> recompute_objective(const SceneGraph& sg,
                                                  const Grid& grid,
                                                  const Layout& layout,
                                                  const CoarseHint* hint = nullptr);

}  // namespace gridplan
