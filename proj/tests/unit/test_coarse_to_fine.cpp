#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "gridplan/coarse_to_fine.hpp"
#include "gridplan/common.hpp"
#include "gridplan/ip_builder.hpp"
#include "gridplan/scene_graph.hpp"
#include "test_support.hpp"

using namespace gridplan;
using testsupport::base_scene;
using testsupport::furniture_doc;
using testsupport::room_doc;

TEST_CASE("fine cells map to coarse blocks by floor division") {
  CHECK(map_fine_to_coarse(Cell{0, 0}, 2, 2) == Cell{0, 0});
  CHECK(map_fine_to_coarse(Cell{1, 1}, 2, 2) == Cell{0, 0});
  CHECK(map_fine_to_coarse(Cell{2, 1}, 2, 2) == Cell{1, 0});
  CHECK(map_fine_to_coarse(Cell{11, 9}, 3, 2) == Cell{3, 4});
  for (int i = 0; i < 24; ++i) {
    for (int s = 1; s <= 4; ++s) {
      CHECK(map_fine_to_coarse(Cell{i, 0}, s, 1).i ==
            static_cast<int>(std::floor(static_cast<double>(i) / s)));
    }
  }
}

TEST_CASE("downsampling keeps majority-indoor blocks and rescales targets") {
  auto doc = base_scene(8, 6);
  // Carve a 3x2 outdoor notch in the north-east corner; the 2x2 block at
  // coarse (3,2) loses all four cells, coarse (2,2) only two of four.
  doc["floor"]["outdoor_cells"] =
      json::array({{5, 4}, {5, 5}, {6, 4}, {6, 5}, {7, 4}, {7, 5}});
  doc["rooms"].push_back(room_doc(1, "bedroom", 9));
  auto living = room_doc(2, "living", 10, true);
  living["furniture"].push_back(furniture_doc(1, "sofa", 2, 1));
  doc["rooms"].push_back(living);
  doc["constraints"]["adjacency_pairs"] = {{1, 2}};
  doc["constraints"]["privacy_order"] = {1};
  SceneGraph sg = scene_graph_from_json(doc);

  SceneGraph coarse = downsample_scene(sg, 2, 2);
  CHECK(coarse.floor.width_cells == 4);
  CHECK(coarse.floor.length_cells == 3);
  CHECK(coarse.floor.cell_size_m == doctest::Approx(1.0));
  CHECK(coarse.floor.entrance == Cell{0, 0});
  // Only the fully-outdoor block disappears; the half-outdoor one stays.
  REQUIRE(coarse.floor.outdoor_cells.size() == 1);
  CHECK(coarse.floor.outdoor_cells[0] == Cell{3, 2});

  REQUIRE(coarse.rooms.size() == 2);
  CHECK(coarse.rooms[0].target_area_cells == 2);  // 9/4 rounds up
  CHECK(coarse.rooms[1].target_area_cells == 3);  // 10/4 = 2.5 rounds half up
  CHECK(coarse.rooms[1].open);
  CHECK(coarse.rooms[0].furniture.empty());
  CHECK(coarse.rooms[1].furniture.empty());
  CHECK(coarse.constraints.adjacency_pairs.size() == 1);
  CHECK(coarse.constraints.privacy_order == std::vector<int>{1});

  CHECK_THROWS_AS(downsample_scene(sg, 8, 6), DegenerateGrid);
  CHECK_THROWS_AS(downsample_scene(sg, 0, 2), DegenerateGrid);
}

TEST_CASE("tiny room targets never rescale to zero") {
  auto doc = base_scene(6, 6);
  doc["rooms"].push_back(room_doc(1, "wc", 1));
  SceneGraph coarse = downsample_scene(scene_graph_from_json(doc), 3, 3);
  CHECK(coarse.rooms[0].target_area_cells == 1);
}

TEST_CASE("the hint pins fine cells to their coarse labels") {
  auto doc = base_scene(6, 4);
  doc["rooms"].push_back(room_doc(1, "store", 8));
  SceneGraph sg = scene_graph_from_json(doc);
  SceneGraph coarse_sg = downsample_scene(sg, 2, 2);
  Grid coarse_grid = make_grid(coarse_sg.floor);
  MilpModel coarse_model = build_model(coarse_sg, coarse_grid, "coarse");
  Solution coarse_sol = solve_builtin(coarse_model, SolveParams{});
  REQUIRE(coarse_sol.status == SolveStatus::Optimal);
  Layout coarse_layout = decode_layout(coarse_model, coarse_sol.values);

  auto hint = make_hint(sg, coarse_sg, coarse_layout, 2, 2);
  CHECK(hint->coarse_width == 3);
  CHECK(hint->coarse_length == 2);
  REQUIRE(hint->pi.size() == 24);
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 6; ++i) {
      CHECK(hint->pi[j * 6 + i] == (j / 2) * 3 + (i / 2));
    }
  }

  // Adopting the hinted label on every hinted cell cancels the whole
  // deviation penalty.
  Grid grid = make_grid(sg.floor);
  MilpModel fine = build_model(sg, grid, "fine", hint);
  const ObjectiveGroup* ref = nullptr;
  for (const auto& g : fine.objective) {
    if (g.name == "ref") ref = &g;
  }
  REQUIRE(ref != nullptr);
  CHECK(ref->weight == doctest::Approx(1.0));

  std::vector<double> values(fine.variables.size(), 0.0);
  for (const auto& [name, value] : hint->warm_start) {
    int v = fine.var(name);
    REQUIRE(v >= 0);
    values[v] = value;
  }
  double dev = ref->constant;
  for (const LinTerm& t : ref->terms) dev += t.coef * values[t.var];
  CHECK(dev == doctest::Approx(0.0));

  // The warm start also round-trips into the model itself.
  CHECK(fine.warm_start.size() == hint->warm_start.size());
}

TEST_CASE("solve_scene runs coarse then fine and reports both phases") {
  auto doc = base_scene(6, 4);
  auto room = room_doc(1, "bedroom", 8);
  room["furniture"].push_back(furniture_doc(1, "bed", 1, 2, true));
  doc["rooms"].push_back(room);
  SceneGraph sg = scene_graph_from_json(doc);

  SolveOptions options;
  options.params.time_limit_s = 300.0;
  SolveReport report = solve_scene(sg, options);

  REQUIRE(report.phases.size() == 2);
  CHECK(report.phases[0].name == "coarse");
  CHECK(report.phases[1].name == "fine");
  CHECK(report.phases[0].binaries < report.phases[1].binaries);
  CHECK_FALSE(report.used_fallback);
  REQUIRE(report.hint != nullptr);
  CHECK(report.status == SolveStatus::Optimal);
  REQUIRE(report.has_layout);
  CHECK(report.layout.width == 6);
  CHECK(report.layout.furniture.size() == 1);
  CHECK(report.total_wall_time_s > 0.0);

  SolveReport again = solve_scene(sg, options);
  CHECK(again.layout.labels == report.layout.labels);

  SolveOptions direct = options;
  direct.coarse_to_fine = false;
  SolveReport flat = solve_scene(sg, direct);
  REQUIRE(flat.phases.size() == 1);
  CHECK(flat.phases[0].name == "direct");
  CHECK(flat.status == SolveStatus::Optimal);
  // The deviation penalty only rewards agreement with the coarse pass; it
  // never makes the fine optimum worse than the direct one.
  CHECK(report.phases[1].objective >= flat.phases[0].objective - 1e-6);
}

TEST_CASE("solve_scene falls back to a direct solve when coarse cannot run") {
  auto doc = base_scene(3, 3);
  doc["rooms"].push_back(room_doc(1, "a", 2));
  doc["rooms"].push_back(room_doc(2, "b", 2));
  doc["rooms"].push_back(room_doc(3, "c", 2));
  SceneGraph sg = scene_graph_from_json(doc);

  SolveOptions options;
  options.s_i = 3;
  options.s_j = 3;  // one coarse cell for three rooms
  SolveReport report = solve_scene(sg, options);

  CHECK(report.used_fallback);
  CHECK(report.fallback_reason.find("coarse grid keeps") != std::string::npos);
  REQUIRE(report.phases.size() == 1);
  CHECK(report.phases[0].name == "direct");
  CHECK(report.hint == nullptr);
  CHECK(report.status == SolveStatus::Optimal);
}

TEST_CASE("solve_scene drives the external adapter end to end") {
  auto doc = base_scene(4, 3);
  doc["rooms"].push_back(room_doc(1, "store", 5));
  SceneGraph sg = scene_graph_from_json(doc);

  SolveOptions options;
  options.backend = "external";
  options.params.time_limit_s = 120.0;
  SolveReport report = solve_scene(sg, options);
  REQUIRE(report.status == SolveStatus::Optimal);
  REQUIRE(report.phases.size() == 2);

  SolveOptions builtin;
  builtin.params.time_limit_s = 120.0;
  SolveReport mine = solve_scene(sg, builtin);
  CHECK(report.phases.back().objective ==
        doctest::Approx(mine.phases.back().objective).epsilon(1e-6));

  SolveOptions bogus;
  bogus.backend = "simplex-by-hand";
  CHECK_THROWS_AS(solve_scene(sg, bogus), BuildError);
}
