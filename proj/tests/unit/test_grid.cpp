#include <doctest.h>

#include <algorithm>

#include "gridplan/grid.hpp"

using namespace gridplan;

TEST_CASE("directions: offsets, inverses, letters") {
  CHECK(offset(Direction::E) == std::pair<int, int>(1, 0));
  CHECK(offset(Direction::W) == std::pair<int, int>(-1, 0));
  CHECK(offset(Direction::S) == std::pair<int, int>(0, -1));
  CHECK(offset(Direction::N) == std::pair<int, int>(0, 1));
  for (Direction d : kDirections) {
    CHECK(inverse(inverse(d)) == d);
    auto [di, dj] = offset(d);
    auto [ii, ij] = offset(inverse(d));
    CHECK(di + ii == 0);
    CHECK(dj + ij == 0);
  }
  CHECK(direction_letter(Direction::E) == 'e');
  CHECK(direction_letter(Direction::N) == 'n');
}

TEST_CASE("grid with a hollow core") {
  // 4x4 with the four middle cells outdoor: 12 indoor cells in a ring.
  std::vector<Cell> outdoor = {{1, 1}, {2, 1}, {1, 2}, {2, 2}};
  Grid grid(4, 4, outdoor, {0, 0});

  CHECK(grid.indoor_count() == 12);
  CHECK(grid.boundary_cells().size() == 12);  // the whole ring touches void
  CHECK(grid.indoor({0, 0}));
  CHECK_FALSE(grid.indoor({1, 1}));
  CHECK_FALSE(grid.indoor({-1, 0}));
  CHECK_FALSE(grid.indoor({4, 0}));

  // Ring cells have exactly two indoor neighbors each.
  for (Cell c : grid.indoor_cells()) {
    CHECK(grid.neighbors(c).size() == 2);
    CHECK(grid.has_void_neighbor(c));
  }

  CHECK_FALSE(grid.adj({0, 0}, Direction::W).has_value());
  CHECK_FALSE(grid.adj({0, 1}, Direction::E).has_value());  // (1,1) is outdoor
  CHECK(grid.adj({0, 0}, Direction::E) == Cell{1, 0});

  CHECK(std::is_sorted(grid.indoor_cells().begin(), grid.indoor_cells().end()));
}

TEST_CASE("adjacency is symmetric") {
  std::vector<Cell> outdoor = {{0, 3}, {3, 0}, {2, 2}};
  Grid grid(4, 5, outdoor, {0, 0});
  for (Cell c : grid.indoor_cells()) {
    for (Direction d : kDirections) {
      auto n = grid.adj(c, d);
      if (!n.has_value()) continue;
      auto back = grid.adj(*n, inverse(d));
      REQUIRE(back.has_value());
      CHECK(*back == c);
    }
  }
}

TEST_CASE("neighbors follow the E,W,S,N order") {
  Grid grid(3, 3, {}, {0, 0});
  auto nbrs = grid.neighbors({1, 1});
  REQUIRE(nbrs.size() == 4);
  CHECK(nbrs[0] == Cell{2, 1});
  CHECK(nbrs[1] == Cell{0, 1});
  CHECK(nbrs[2] == Cell{1, 0});
  CHECK(nbrs[3] == Cell{1, 2});
}

TEST_CASE("grid constructor rejects bad input") {
  CHECK_THROWS_AS(Grid(0, 3, {}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Grid(3, 3, {{3, 0}}, {0, 0}), OutOfBounds);
  CHECK_THROWS_AS(Grid(3, 3, {{0, 0}}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Grid(3, 3, {}, {5, 5}), std::invalid_argument);
  CHECK_THROWS_AS(Grid(3, 3, {}, {0, 0}).neighbors({7, 7}), OutOfBounds);
}

TEST_CASE("interior cells are not boundary cells") {
  Grid grid(5, 4, {}, {0, 0});
  auto boundary = grid.boundary_cells();
  // 5x4 full rectangle: everything except the 3x2 interior block.
  CHECK(boundary.size() == 20 - 6);
  for (Cell c : boundary) {
    CHECK((c.i == 0 || c.i == 4 || c.j == 0 || c.j == 3));
  }
  CHECK_FALSE(grid.has_void_neighbor({2, 1}));
}
