#pragma once

// Shared between the completion logic in ip_builder.cpp and the builtin
// branch-and-bound. Both must pick orientation cases and room bounding boxes
// with exactly the same arithmetic, or the two solvers would disagree on
// objective values.

#include <algorithm>
#include <utility>

#include "gridplan/common.hpp"
#include "gridplan/grid.hpp"
#include "gridplan/scene_graph.hpp"

namespace gridplan::detail {

// Footprint extents as linear functions of sigma:
//   len_i = W + (L - W) * sigma,  len_j = L + (W - L) * sigma.
inline int len_i_of(const FurnitureSpec& item, int sigma) {
  return sigma ? item.length_cells : item.width_cells;
}
inline int len_j_of(const FurnitureSpec& item, int sigma) {
  return sigma ? item.width_cells : item.length_cells;
}

// Facing direction from the orientation bits.
inline std::pair<int, int> nu_of(int sigma, int mu) {
  int s = 1 - 2 * mu;
  return {sigma * s, (1 - sigma) * s};
}

// Case binaries are ordered E, W, S, N to match kDirections.
inline int case_of(int sigma, int mu) {
  if (sigma == 1) return mu == 0 ? 0 : 1;  // E : W
  return mu == 1 ? 2 : 3;                  // S : N
}

inline int room_index_by_id(const SceneGraph& sg, int id) {
  for (size_t rk = 0; rk < sg.rooms.size(); ++rk) {
    if (sg.rooms[rk].id == id) return static_cast<int>(rk);
  }
  throw ReferenceError("unknown room id " + std::to_string(id));
}

inline int item_index_by_id(const RoomSpec& room, int id) {
  for (size_t l = 0; l < room.furniture.size(); ++l) {
    if (room.furniture[l].id == id) return static_cast<int>(l);
  }
  throw ReferenceError("room " + std::to_string(room.id) +
                       " has no furniture id " + std::to_string(id));
}

struct RoomGeometry {
  bool empty = true;
  int min_i = 0, max_i = 0, min_j = 0, max_j = 0;
  int count = 0;

  void add(Cell c) {
    if (empty) {
      empty = false;
      min_i = max_i = c.i;
      min_j = max_j = c.j;
      count = 1;
    } else {
      min_i = std::min(min_i, c.i);
      max_i = std::max(max_i, c.i);
      min_j = std::min(min_j, c.j);
      max_j = std::max(max_j, c.j);
      ++count;
    }
  }
};

// A placed furniture rectangle.
struct BoxInfo {
  int min_i = 0, min_j = 0, len_i = 1, len_j = 1, sigma = 0, mu = 0;
};

struct RoomBoxChoice {
  int mi = 0, mj = 0, li = 1, lj = 1;
  // Weighted rect + aspect + balance cost of this box. The rect part is
  // w.rect * li * lj; the caller subtracts w.rect * cell count itself.
  double cost = 0.0;
};

// The objective-minimising bounding box for a room with the given cell
// extent. acc_i/acc_j are the furniture-area-weighted doubled centroid sums
// and total_area their footprint total; they are ignored unless use_bal.
RoomBoxChoice best_room_box(const ObjectiveWeights& w, int W, int L,
                            const RoomGeometry& rg, double acc_i, double acc_j,
                            double total_area, bool use_bal);

}  // namespace gridplan::detail
