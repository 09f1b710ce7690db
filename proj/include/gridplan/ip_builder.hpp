#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridplan/grid.hpp"
#include "gridplan/layout.hpp"
#include "gridplan/scene_graph.hpp"

namespace gridplan {

struct CoarseHint;  // defined in coarse_to_fine.hpp

enum class VarKind { Binary, Integer, Continuous };

struct VarDef {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lo = 0.0;
  double hi = 0.0;
};

enum class RowSense { LE, GE, EQ };

struct LinTerm {
  int var = -1;
  double coef = 0.0;
};

struct Row {
  std::string name;
  std::vector<LinTerm> terms;
  RowSense sense = RowSense::LE;
  double rhs = 0.0;
};

// One weighted objective term family (e.g. the rectangularity penalty).
// `terms` and `constant` express the unweighted value; the weight is applied
// when evaluating or exporting.
struct ObjectiveGroup {
  std::string name;
  double weight = 0.0;
  std::vector<LinTerm> terms;
  double constant = 0.0;
};

// Semantic information the builder records alongside the flat model. The
// builtin solver and the layout decoder need to know which variable plays
// which role; a model imported from an LP file has none of this.
struct BuildContext {
  BuildContext(SceneGraph s, Grid g) : sg(std::move(s)), grid(std::move(g)) {}

  SceneGraph sg;
  Grid grid;
  bool coarse = false;
  std::shared_ptr<const CoarseHint> hint;

  // Compact indoor-cell indexing.
  std::vector<int> compact;        // width*length entries, -1 when not indoor
  std::vector<Cell> cells;         // compact index -> cell
  int cell_index(Cell c) const { return compact[static_cast<size_t>(c.j) * grid.width() + c.i]; }

  // Variable indices (-1 when the variable does not exist in this model).
  std::vector<std::vector<int>> x;            // [room][compact cell]
  std::vector<int> p;                         // [compact cell]
  std::vector<std::vector<std::vector<int>>> f;  // [room][item][compact cell]
  std::vector<std::vector<int>> sigma;        // [room][item]
  std::vector<std::vector<int>> mu;           // [room][item]
  std::vector<std::vector<std::array<int, 4>>> cases;  // [room][item][E,W,S,N]
  std::vector<std::array<int, 4>> flow;       // [compact cell][E,W,S,N]
  std::vector<int> gamma_min_i, gamma_min_j, gamma_len_i, gamma_len_j;  // [room]
  std::vector<std::vector<int>> xi_min_i, xi_min_j;  // [room][item]

  int room_count() const { return static_cast<int>(sg.rooms.size()); }
  int item_count(int room_idx) const {
    return coarse ? 0 : static_cast<int>(sg.rooms[room_idx].furniture.size());
  }
};

struct ModelMetadata {
  std::string scene_digest;
  std::string phase;  // "direct", "coarse" or "fine"
  int width = 0;
  int length = 0;
  int indoor_cells = 0;
  int binary_count = 0;
  int integer_count = 0;
  int continuous_count = 0;
};

struct MilpModel {
  std::vector<VarDef> variables;
  std::vector<Row> rows;
  std::vector<ObjectiveGroup> objective;
  double big_M = 0.0;
  ModelMetadata metadata;
  std::unordered_map<std::string, int> var_index;
  std::shared_ptr<const BuildContext> context;
  // Names of the encoders that have run; complete_solution only enforces the
  // semantics of constraint families that are actually in the model.
  std::set<std::string> encoded;
  // Preferred solution values keyed by variable name (from a coarse pass).
  std::map<std::string, double> warm_start;

  int add_var(const std::string& name, VarKind kind, double lo, double hi);
  Row& add_row(const std::string& name, RowSense sense, double rhs);
  ObjectiveGroup& group(const std::string& name, double weight);
  int var(const std::string& name) const;  // -1 when absent
  void refresh_metadata_counts();

  // Weighted objective value for a full assignment (indexed by variable).
  double eval_objective(const std::vector<double>& values) const;
  // Unweighted per-group values, keyed by group name.
  std::map<std::string, double> eval_groups(const std::vector<double>& values) const;
  double objective_constant() const;
};

// Declares every decision variable for the scene and returns the model with
// its BuildContext attached, but no constraint rows yet.
MilpModel declare_variables(const SceneGraph& sg, const Grid& grid, bool coarse,
                            std::shared_ptr<const CoarseHint> hint = nullptr);

// Constraint encoders. Each expects the model to come from declare_variables.
void encode_non_overlap(MilpModel& model);
void encode_connectivity(MilpModel& model);
void encode_accessibility(MilpModel& model);
void encode_adjacency(MilpModel& model);
void encode_room_bbox(MilpModel& model);
void encode_corner(MilpModel& model);
void encode_furniture(MilpModel& model);
void encode_against_wall(MilpModel& model);
void encode_alignment_facing(MilpModel& model);
void add_objectives(MilpModel& model);

// Runs the full pipeline: declare, encode everything, add objectives.
// phase "coarse" drops furniture variables and furniture-level constraints;
// phase "fine" additionally charges for deviating from the coarse hint.
MilpModel build_model(const SceneGraph& sg, const Grid& grid,
                      const std::string& phase = "direct",
                      std::shared_ptr<const CoarseHint> hint = nullptr);

// Assignment helpers -------------------------------------------------------

// Structural variables (x, p, f, sigma, mu) from a layout; everything else is
// left NaN for complete_solution to fill in.
std::vector<double> layout_to_values(const MilpModel& model, const Layout& layout);

// Fills derived variables (orientation cases, witnesses, flows, bounding
// boxes, objective auxiliaries) from the structural ones, choosing values
// that minimise the objective among completions. Returns false when the
// structural assignment admits no feasible completion (disconnected
// corridor, non-rectangular furniture, missing witness, facing violation).
bool complete_solution(const MilpModel& model, std::vector<double>& values);

// True when `values` satisfies every row within `tol`.
bool satisfies_rows(const MilpModel& model, const std::vector<double>& values,
                    double tol, std::string* first_violation = nullptr);

// Decodes solver values into cell labels, furniture boxes and the
// per-group objective breakdown.
Layout decode_layout(const MilpModel& model, const std::map<std::string, double>& values);
Layout decode_layout(const MilpModel& model, const std::vector<double>& values);

}  // namespace gridplan
