#pragma once

#include <cstdint>
#include <vector>

#include "gridplan/grid.hpp"
#include "gridplan/layout.hpp"
#include "gridplan/scene_graph.hpp"

namespace gridplan {

// Wall segments for a layout: exterior walls along every indoor-region
// boundary edge, interior walls between cells of different closed areas.
// Open rooms merge with the corridor, so no wall separates them from it.
std::vector<WallSegment> generate_walls(const SceneGraph& sg, const Grid& grid,
                                        const Layout& layout);

// One door per closed room on an interior wall edge whose room-side cell is
// furniture-free, preferring edges onto open areas over plain corridor, plus
// the entrance door on the entrance cell's boundary. Throws NoCandidate when
// a closed room has no eligible edge (a constraint violation upstream).
std::vector<Door> place_doors(const SceneGraph& sg, const Grid& grid,
                              const Layout& layout,
                              const std::vector<WallSegment>& walls,
                              uint64_t seed);

// Up to `count_per_space` windows per room and for the corridor, sampled
// without replacement from exterior wall edges with furniture-free inner
// cells.
std::vector<Window> place_windows(const SceneGraph& sg, const Grid& grid,
                                  const Layout& layout,
                                  const std::vector<WallSegment>& walls,
                                  uint64_t seed, int count_per_space = 2);

// Runs all three steps.
FloorplanArtifacts postprocess(const SceneGraph& sg, const Grid& grid,
                               const Layout& layout, uint64_t seed,
                               int windows_per_space = 2);

}  // namespace gridplan
