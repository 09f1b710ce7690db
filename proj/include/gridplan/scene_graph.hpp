#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridplan/grid.hpp"

namespace gridplan {

using json = nlohmann::json;

enum class CornerPref { NW, NE, SW, SE };

std::string corner_name(CornerPref c);
std::optional<CornerPref> corner_from_name(const std::string& name);

// Corner cell convention: i west->east, j south->north, so
// NW=(0,L-1), NE=(W-1,L-1), SW=(0,0), SE=(W-1,0).
Cell corner_cell(CornerPref c, int width, int length);

struct FurnitureSpec {
  int id = 0;  // 1..N_k within its room
  std::string name;
  int width_cells = 1;
  int length_cells = 1;
  bool against_wall = false;

  int footprint() const { return width_cells * length_cells; }
};

struct RoomSpec {
  int id = 0;  // 1..N
  std::string name;
  int target_area_cells = 1;
  bool open = false;
  std::optional<CornerPref> corner_pref;
  std::vector<FurnitureSpec> furniture;
};

struct FloorSpec {
  int width_cells = 0;
  int length_cells = 0;
  double cell_size_m = 1.0;
  std::vector<Cell> outdoor_cells;
  Cell entrance;
};

struct AdjacencyPair {
  int k = 0;
  int m = 0;
};

// (room, l1, l2) furniture pair; for facing, l1 faces l2.
struct FurniturePair {
  int room = 0;
  int l1 = 0;
  int l2 = 0;
};

struct RelativeOffset {
  int room = 0;
  int l1 = 0;
  int l2 = 0;
  int di = 0;  // target centroid offset c(l1) - c(l2), cell units
  int dj = 0;
};

struct ConstraintSet {
  std::vector<AdjacencyPair> adjacency_pairs;
  std::vector<int> privacy_order;  // most private first
  std::vector<FurniturePair> alignment_pairs;
  std::vector<FurniturePair> facing_pairs;
  std::vector<RelativeOffset> relative_offsets;
};

struct ObjectiveWeights {
  // Defaults mirror configs/config.default.json.
  double rect = 3.0;
  double perim = 0.5;
  double area = 2.0;
  double aspect = 1.0;
  double rel = 1.0;
  double bal = 1.0;
  double priv = 1.0;
  double ref = 1.0;
};

struct SceneGraph {
  FloorSpec floor;
  std::vector<RoomSpec> rooms;
  ConstraintSet constraints;
  ObjectiveWeights weights;
  json metadata;  // free-form annotations (e.g. llm_frontend notes)

  const RoomSpec* room_by_id(int k) const;
  const FurnitureSpec* furniture_by_id(int k, int l) const;
};

struct Diagnostic {
  std::string code;     // e.g. "CapacityError", "EntranceNotOnBoundary"
  std::string message;
  bool fatal = false;
};

// Parses + fully checks a scene-graph JSON document (schema_version 1).
// Throws SchemaError / ReferenceError / CapacityError; a document is accepted
// iff validate_scene_graph on the result reports no fatal diagnostic.
SceneGraph parse_scene_graph(const std::string& document);

SceneGraph scene_graph_from_json(const json& doc);

// Invariant checks plus heuristic warnings; never throws.
std::vector<Diagnostic> validate_scene_graph(const SceneGraph& sg);

json scene_graph_to_json(const SceneGraph& sg);
std::string serialize_scene_graph(const SceneGraph& sg);

// Stable content digest (hex) used in model metadata and run reports.
std::string scene_digest(const SceneGraph& sg);

Grid make_grid(const FloorSpec& floor);

// Reads an ObjectiveWeights JSON file; all eight keys are required there
// (unlike scene documents, where omitted keys fall back to defaults).
ObjectiveWeights load_weights_file(const std::string& path);

}  // namespace gridplan
