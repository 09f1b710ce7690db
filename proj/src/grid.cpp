#include "gridplan/grid.hpp"

#include <stdexcept>

namespace gridplan {

Grid::Grid(int width, int length, const std::vector<Cell>& outdoor,
           Cell entrance)
    : w_(width), l_(length), entrance_(entrance) {
  if (w_ < 1 || l_ < 1) {
    throw std::invalid_argument("grid extents must be positive");
  }
  mask_.assign(static_cast<size_t>(w_) * l_, 1);
  for (Cell c : outdoor) {
    if (!in_bounds(c)) {
      throw OutOfBounds("outdoor cell (" + std::to_string(c.i) + "," +
                        std::to_string(c.j) + ") outside grid");
    }
    mask_[static_cast<size_t>(c.j) * w_ + c.i] = 0;
  }
  if (!indoor(entrance_)) {
    throw std::invalid_argument("entrance cell must be indoor");
  }
  for (int i = 0; i < w_; ++i) {
    for (int j = 0; j < l_; ++j) {
      if (indoor({i, j})) indoor_cells_.push_back({i, j});
    }
  }
}

std::vector<Cell> Grid::neighbors(Cell c) const {
  if (!in_bounds(c)) {
    throw OutOfBounds("neighbors() of cell (" + std::to_string(c.i) + "," +
                      std::to_string(c.j) + ") outside grid");
  }
  std::vector<Cell> out;
  for (Direction d : kDirections) {
    auto [di, dj] = offset(d);
    Cell n{c.i + di, c.j + dj};
    if (indoor(n)) out.push_back(n);
  }
  return out;
}

std::optional<Cell> Grid::adj(Cell c, Direction d) const {
  auto [di, dj] = offset(d);
  Cell n{c.i + di, c.j + dj};
  if (indoor(n)) return n;
  return std::nullopt;
}

bool Grid::has_void_neighbor(Cell c) const {
  for (Direction d : kDirections) {
    if (!adj(c, d)) return true;
  }
  return false;
}

std::vector<Cell> Grid::boundary_cells() const {
  std::vector<Cell> out;
  for (Cell c : indoor_cells_) {
    if (has_void_neighbor(c)) out.push_back(c);
  }
  return out;
}

}  // namespace gridplan
