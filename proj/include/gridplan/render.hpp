#pragma once

#include <string>

#include "gridplan/layout.hpp"
#include "gridplan/scene_graph.hpp"

namespace gridplan {

// Drawing parameters. Room fills derive from a stable hash of the room name,
// not insertion order, so re-ordering rooms in a scene leaves the image
// unchanged.
struct RenderStyle {
  int cell_px = 24;             // clamped up to 4, the minimum readable size
  double wall_stroke = 3.0;
  double thin_stroke = 1.2;
  bool hatch_outdoor = true;
  bool legend = false;          // appends a name/color strip below the plan
};

// Stable pastel fill for a room name, as an SVG color literal.
std::string room_color(const std::string& name);

// Deterministic SVG floorplan: hatched outdoor cells, colored rooms, neutral
// corridor, thick walls, quarter-circle door sweeps, white window segments,
// furniture boxes with a tick toward their facing direction. Walls, doors and
// windows come from layout.artifacts when present. The viewBox spans exactly
// width x length cells at cell_px (plus the legend strip when enabled), and
// identical inputs produce identical bytes.
std::string render_svg(const SceneGraph& sg, const Layout& layout,
                       const RenderStyle& style = {});

}  // namespace gridplan
