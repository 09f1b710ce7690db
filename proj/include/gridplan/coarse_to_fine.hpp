#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gridplan/ip_builder.hpp"
#include "gridplan/layout.hpp"
#include "gridplan/scene_graph.hpp"
#include "gridplan/solver.hpp"

namespace gridplan {

// Everything the fine phase needs from a solved coarse layout.
struct CoarseHint {
  int s_i = 2;
  int s_j = 2;
  int coarse_width = 0;
  int coarse_length = 0;
  // Fine cell (j * W + i) -> coarse cell (cj * CW + ci); -1 when the fine
  // cell's coarse image is outdoor.
  std::vector<int> pi;
  // Per coarse cell: -1 outdoor, 0 corridor, otherwise the room id.
  std::vector<int> coarse_labels;
  // Suggested fine values for x and p variables, keyed by variable name.
  std::map<std::string, double> warm_start;
};

// Downsample mapping for a single cell (0-based grids).
Cell map_fine_to_coarse(Cell fine, int s_i, int s_j);

// Coarse scene: ceil(W/s_i) x ceil(L/s_j) grid, a coarse cell is indoor when
// at least half of its constituent fine cells are (ties indoor) and the
// entrance's image is always indoor; room target areas are rescaled
// (round half up, minimum 1); furniture is dropped, cell-level constraints
// (corner, adjacency, privacy) are kept. Throws DegenerateGrid when the
// coarse indoor region has fewer cells than there are rooms.
SceneGraph downsample_scene(const SceneGraph& sg, int s_i, int s_j);

// Builds the hint for the fine phase from a solved coarse layout.
std::shared_ptr<CoarseHint> make_hint(const SceneGraph& fine_sg,
                                      const SceneGraph& coarse_sg,
                                      const Layout& coarse_layout, int s_i,
                                      int s_j);

struct SolveOptions {
  bool coarse_to_fine = true;
  int s_i = 2;
  int s_j = 2;
  std::string backend = "builtin";  // "builtin" or "external"
  std::string solver_command;       // external command template; "" = default
  SolveParams params;
};

struct PhaseReport {
  std::string name;  // "coarse", "fine" or "direct"
  std::string status;
  double objective = 0.0;
  double bound = 0.0;
  double wall_time_s = 0.0;
  long long nodes = 0;
  int binaries = 0;
  int rows = 0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::Infeasible;
  bool has_layout = false;
  Layout layout;
  std::vector<PhaseReport> phases;
  bool used_fallback = false;      // coarse pass failed; solved direct instead
  std::string fallback_reason;
  std::shared_ptr<CoarseHint> hint;  // set when the fine phase ran
  double total_wall_time_s = 0.0;
};

// Solves the scene, coarse-to-fine by default, falling back to a direct solve
// when the coarse pass is infeasible or cannot be built.
SolveReport solve_scene(const SceneGraph& sg, const SolveOptions& options);

}  // namespace gridplan
