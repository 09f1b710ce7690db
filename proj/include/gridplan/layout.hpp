#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridplan/scene_graph.hpp"

namespace gridplan {

// Grid-edge segment. Interior edges are canonicalized to the lexicographically
// smaller cell with direction E or N; boundary edges keep whatever void
// direction they face.
struct EdgeRef {
  Cell cell;
  Direction dir = Direction::E;

  friend bool operator==(const EdgeRef& a, const EdgeRef& b) {
    return a.cell == b.cell && a.dir == b.dir;
  }
  friend bool operator<(const EdgeRef& a, const EdgeRef& b) {
    if (a.cell != b.cell) return a.cell < b.cell;
    return static_cast<int>(a.dir) < static_cast<int>(b.dir);
  }
};

struct WallSegment {
  EdgeRef edge;
  bool exterior = false;
};

struct Door {
  EdgeRef edge;
  int room = 0;  // owning room id; 0 for the corridor-side entrance door
  std::string kind;  // "room" or "entrance"
};

struct Window {
  EdgeRef edge;
  std::string space;  // "corridor" or the owning room name
};

struct FloorplanArtifacts {
  std::vector<WallSegment> walls;
  std::vector<Door> doors;
  std::vector<Window> windows;
};

// A solved assignment, decoded from solver variables or loaded from disk.
struct Layout {
  static constexpr int kOutside = -1;  // not part of the indoor region
  static constexpr int kCorridor = 0;

  int width = 0;
  int length = 0;
  std::vector<int> labels;  // width*length entries, index j*width + i

  struct Box {
    int room = 0;
    int id = 0;
    Cell origin;           // minimum-coordinate cell
    int len_i = 1;
    int len_j = 1;
    int nu_i = 0;          // facing direction, one of the four axis units
    int nu_j = 1;
  };
  std::vector<Box> furniture;

  std::map<std::string, double> objective_breakdown;
  std::optional<FloorplanArtifacts> artifacts;

  int label(Cell c) const { return labels[static_cast<size_t>(c.j) * width + c.i]; }
  void set_label(Cell c, int v) {
    labels[static_cast<size_t>(c.j) * width + c.i] = v;
  }
  // Traversable for connectivity purposes: corridor, or open-room cell not
  // covered by furniture.
  bool is_q_cell(const SceneGraph& sg, Cell c) const;
  bool furniture_covers(Cell c) const;
};

// Layout file = scene + layout (+ artifacts), one self-contained document.
json layout_to_json(const SceneGraph& sg, const Layout& layout);
std::string serialize_layout(const SceneGraph& sg, const Layout& layout);

struct LayoutFile {
  SceneGraph scene;
  Layout layout;
};
LayoutFile layout_from_json(const json& doc);
LayoutFile parse_layout(const std::string& text);

}  // namespace gridplan
