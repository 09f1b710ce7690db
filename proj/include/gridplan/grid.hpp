#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gridplan/common.hpp"

namespace gridplan {

// Cell coordinates: i runs west -> east (0..W-1), j runs south -> north
// (0..L-1). Comparison is lexicographic on (i, j); that ordering is the
// canonical iteration order everywhere (variable naming, serialization).
struct Cell {
  int i = 0;
  int j = 0;

  friend bool operator==(Cell a, Cell b) { return a.i == b.i && a.j == b.j; }
  friend bool operator!=(Cell a, Cell b) { return !(a == b); }
  friend bool operator<(Cell a, Cell b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  }
};

enum class Direction : uint8_t { E = 0, W = 1, S = 2, N = 3 };

inline constexpr std::array<Direction, 4> kDirections = {
    Direction::E, Direction::W, Direction::S, Direction::N};

inline Direction inverse(Direction d) {
  switch (d) {
    case Direction::E: return Direction::W;
    case Direction::W: return Direction::E;
    case Direction::S: return Direction::N;
    case Direction::N: return Direction::S;
  }
  return Direction::E;
}

inline std::pair<int, int> offset(Direction d) {
  switch (d) {
    case Direction::E: return {1, 0};
    case Direction::W: return {-1, 0};
    case Direction::S: return {0, -1};
    case Direction::N: return {0, 1};
  }
  return {0, 0};
}

inline char direction_letter(Direction d) {
  switch (d) {
    case Direction::E: return 'e';
    case Direction::W: return 'w';
    case Direction::S: return 's';
    case Direction::N: return 'n';
  }
  return '?';
}

// The discretized design space: extents, indoor mask, entrance. Immutable.
class Grid {
 public:
  Grid(int width, int length, const std::vector<Cell>& outdoor, Cell entrance);

  int width() const { return w_; }
  int length() const { return l_; }
  Cell entrance() const { return entrance_; }

  bool in_bounds(Cell c) const {
    return c.i >= 0 && c.i < w_ && c.j >= 0 && c.j < l_;
  }
  // False for out-of-bounds cells, so callers can probe neighbors freely.
  bool indoor(Cell c) const {
    return in_bounds(c) && mask_[static_cast<size_t>(c.j) * w_ + c.i] != 0;
  }

  int indoor_count() const { return static_cast<int>(indoor_cells_.size()); }
  // Sorted by (i, j).
  const std::vector<Cell>& indoor_cells() const { return indoor_cells_; }

  // Indoor 4-neighbors of c, in E, W, S, N order. c may be any grid cell
  // (indoor or outdoor); cells outside the grid are rejected.
  std::vector<Cell> neighbors(Cell c) const;

  // Neighbor of c in direction d if that neighbor lies in the indoor region,
  // otherwise nullopt ("void": off-grid or outdoor).
  std::optional<Cell> adj(Cell c, Direction d) const;

  // Indoor cells with at least one void 4-neighbor. Sorted by (i, j).
  std::vector<Cell> boundary_cells() const;

  bool has_void_neighbor(Cell c) const;

 private:
  int w_;
  int l_;
  std::vector<uint8_t> mask_;
  Cell entrance_;
  std::vector<Cell> indoor_cells_;
};

}  // namespace gridplan
