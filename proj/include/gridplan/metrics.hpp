#pragma once

#include <string>
#include <vector>

#include "gridplan/layout.hpp"
#include "gridplan/scene_graph.hpp"

namespace gridplan {

// Continuous-coordinate scene for the plausibility metrics. Grid layouts
// convert losslessly (one unit per cell); layouts from other tools import
// through the boxscene JSON format so they can be scored the same way.
struct BoxScene {
  struct Rect {
    std::string label;  // room label, or the owning room's label for objects
    double min_x = 0;
    double min_y = 0;
    double max_x = 0;
    double max_y = 0;

    double area() const { return (max_x - min_x) * (max_y - min_y); }
  };

  std::vector<Rect> rooms;
  std::vector<Rect> objects;
};

BoxScene boxscene_from_json(const json& doc);
BoxScene parse_boxscene(const std::string& text);

// One rect per labeled room cell plus one per furniture box, in cell units.
// Corridor cells carry no objects and are omitted.
BoxScene to_boxscene(const SceneGraph& sg, const Layout& layout);

// Object overlap rate: 100 * (sum of pairwise intersection areas) / (total
// object area). Overlaps are counted once per pair, so three objects stacked
// on one spot can push the rate past 100. Zero when there are no objects.
double oor(const BoxScene& scene);

// Out-of-boundary rate: 100 * (sum of per-object area outside the union of
// its owner's room rects) / (total object area). Throws MissingRoom when an
// object names a label no room rect carries.
double oob(const BoxScene& scene);

}  // namespace gridplan
