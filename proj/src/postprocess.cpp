#include "gridplan/postprocess.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "gridplan/common.hpp"

namespace gridplan {

namespace {

// Closed rooms are walled; the corridor and every open room merge into one
// walkable region. Returns the wall class of a cell: 0 for that region, the
// room id for closed rooms.
int wall_class(const SceneGraph& sg, const Layout& layout, Cell c) {
  int lab = layout.label(c);
  if (lab <= 0) return 0;
  const RoomSpec* room = sg.room_by_id(lab);
  return room && room->open ? 0 : lab;
}

}  // namespace

std::vector<WallSegment> generate_walls(const SceneGraph& sg, const Grid& grid,
                                        const Layout& layout) {
  std::vector<WallSegment> walls;
  for (Cell c : grid.indoor_cells()) {
    for (Direction d : kDirections) {
      auto nb = grid.adj(c, d);
      if (!nb.has_value()) {
        walls.push_back(WallSegment{EdgeRef{c, d}, true});
        continue;
      }
      // Interior edges are visited once, from the lexicographically smaller
      // side looking east or north.
      if (d != Direction::E && d != Direction::N) continue;
      if (wall_class(sg, layout, c) != wall_class(sg, layout, *nb)) {
        walls.push_back(WallSegment{EdgeRef{c, d}, false});
      }
    }
  }
  std::sort(walls.begin(), walls.end(),
            [](const WallSegment& a, const WallSegment& b) { return a.edge < b.edge; });
  return walls;
}

std::vector<Door> place_doors(const SceneGraph& sg, const Grid& grid,
                              const Layout& layout,
                              const std::vector<WallSegment>& walls,
                              uint64_t seed) {
  Rng rng(seed);
  std::vector<Door> doors;

  // The entrance keeps its own door on its smallest void direction.
  for (Direction d : kDirections) {
    if (!grid.adj(grid.entrance(), d).has_value()) {
      doors.push_back(Door{EdgeRef{grid.entrance(), d}, 0, "entrance"});
      break;
    }
  }

  auto is_q = [&](Cell c) {
    int lab = layout.label(c);
    if (lab == Layout::kCorridor) return true;
    if (lab <= 0) return false;
    const RoomSpec* room = sg.room_by_id(lab);
    return room && room->open && !layout.furniture_covers(c);
  };

  for (const RoomSpec& room : sg.rooms) {
    if (room.open) continue;
    // Candidate edges, split by what lies on the far side: open areas beat
    // plain corridor.
    std::vector<EdgeRef> onto_open, onto_corridor;
    for (const WallSegment& wall : walls) {
      if (wall.exterior) continue;
      auto nb = grid.adj(wall.edge.cell, wall.edge.dir);
      Cell a = wall.edge.cell;
      Cell b = *nb;
      Cell inside, outside;
      if (layout.label(a) == room.id) {
        inside = a;
        outside = b;
      } else if (layout.label(b) == room.id) {
        inside = b;
        outside = a;
      } else {
        continue;
      }
      if (layout.furniture_covers(inside) || !is_q(outside)) continue;
      if (layout.label(outside) == Layout::kCorridor) {
        onto_corridor.push_back(wall.edge);
      } else {
        onto_open.push_back(wall.edge);
      }
    }
    std::vector<EdgeRef>& pool = onto_open.empty() ? onto_corridor : onto_open;
    if (pool.empty()) {
      throw NoCandidate("room " + std::to_string(room.id) +
                        " has no unobstructed wall edge for a door");
    }
    EdgeRef pick = pool[rng.below(pool.size())];
    doors.push_back(Door{pick, room.id, "room"});
  }
  return doors;
}

std::vector<Window> place_windows(const SceneGraph& sg, const Grid& grid,
                                  const Layout& layout,
                                  const std::vector<WallSegment>& walls,
                                  uint64_t seed, int count_per_space) {
  Rng rng(seed);
  std::vector<Window> windows;
  if (count_per_space <= 0) return windows;

  // The entrance edge belongs to its door; never glaze it.
  EdgeRef entrance_edge;
  bool have_entrance_edge = false;
  for (Direction d : kDirections) {
    if (!grid.adj(grid.entrance(), d).has_value()) {
      entrance_edge = EdgeRef{grid.entrance(), d};
      have_entrance_edge = true;
      break;
    }
  }

  auto sample_space = [&](int label, const std::string& space_name) {
    std::vector<EdgeRef> candidates;
    for (const WallSegment& wall : walls) {
      if (!wall.exterior) continue;
      if (layout.label(wall.edge.cell) != label) continue;
      if (layout.furniture_covers(wall.edge.cell)) continue;
      if (have_entrance_edge && wall.edge == entrance_edge) continue;
      candidates.push_back(wall.edge);
    }
    int take = std::min<int>(count_per_space, static_cast<int>(candidates.size()));
    for (int t = 0; t < take; ++t) {
      size_t at = t + rng.below(candidates.size() - t);
      std::swap(candidates[t], candidates[at]);
      windows.push_back(Window{candidates[t], space_name});
    }
  };

  sample_space(Layout::kCorridor, "corridor");
  for (const RoomSpec& room : sg.rooms) sample_space(room.id, room.name);
  return windows;
}

FloorplanArtifacts postprocess(const SceneGraph& sg, const Grid& grid,
                               const Layout& layout, uint64_t seed,
                               int windows_per_space) {
  FloorplanArtifacts artifacts;
  artifacts.walls = generate_walls(sg, grid, layout);
  artifacts.doors = place_doors(sg, grid, layout, artifacts.walls, seed);
  artifacts.windows =
      place_windows(sg, grid, layout, artifacts.walls, seed, windows_per_space);
  return artifacts;
}

}  // namespace gridplan
