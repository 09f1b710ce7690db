#include <doctest.h>

#include "gridplan/common.hpp"
#include "gridplan/scene_graph.hpp"
#include "test_support.hpp"

using namespace gridplan;
using testsupport::base_scene;
using testsupport::furniture_doc;
using testsupport::repo_path;
using testsupport::room_doc;

TEST_CASE("parse, serialize and re-parse a full scene") {
  json doc = base_scene(6, 5);
  doc["floor"]["outdoor_cells"] = {{5, 4}, {5, 3}};
  json bedroom = room_doc(1, "bedroom", 8);
  bedroom["corner_pref"] = "NW";
  bedroom["furniture"].push_back(furniture_doc(1, "bed", 2, 1, true));
  json lounge = room_doc(2, "lounge", 6, true);
  doc["rooms"] = {bedroom, lounge};
  doc["constraints"]["adjacency_pairs"] = {{1, 2}};
  doc["constraints"]["privacy_order"] = {1, 2};
  doc["weights"] = {{"rect", 3.0}, {"perim", 0.5}, {"area", 2.0},
                    {"aspect", 1.0}, {"rel", 1.0}, {"bal", 1.0},
                    {"priv", 1.0}, {"ref", 1.0}};

  SceneGraph sg = scene_graph_from_json(doc);
  CHECK(sg.floor.width_cells == 6);
  CHECK(sg.rooms.size() == 2);
  CHECK(sg.rooms[0].corner_pref == CornerPref::NW);
  CHECK(sg.rooms[0].furniture.size() == 1);
  CHECK(sg.rooms[0].furniture[0].against_wall);
  CHECK(sg.rooms[1].open);
  CHECK(sg.constraints.adjacency_pairs.size() == 1);
  REQUIRE(sg.room_by_id(2) != nullptr);
  CHECK(sg.room_by_id(2)->name == "lounge");
  CHECK(sg.room_by_id(3) == nullptr);
  CHECK(sg.furniture_by_id(1, 1) != nullptr);
  CHECK(sg.furniture_by_id(1, 2) == nullptr);

  // Round trip through text is stable.
  std::string text = serialize_scene_graph(sg);
  SceneGraph again = parse_scene_graph(text);
  CHECK(serialize_scene_graph(again) == text);
  CHECK(scene_digest(again) == scene_digest(sg));

  // Digest reacts to content changes.
  again.rooms[0].target_area_cells += 1;
  CHECK(scene_digest(again) != scene_digest(sg));
}

TEST_CASE("schema violations are rejected with context") {
  CHECK_THROWS_AS(parse_scene_graph("not json at all"), SchemaError);
  CHECK_THROWS_AS(scene_graph_from_json(json::array()), SchemaError);

  json doc = base_scene(4, 4);
  doc["schema_version"] = 7;
  CHECK_THROWS_AS(scene_graph_from_json(doc), SchemaError);

  doc = base_scene(4, 4);
  doc["floor"].erase("entrance");
  CHECK_THROWS_WITH_AS(scene_graph_from_json(doc),
                       doctest::Contains("entrance"), SchemaError);

  doc = base_scene(4, 4);
  doc["rooms"].push_back(room_doc(1, "a", 4));
  doc["rooms"][0].erase("name");
  CHECK_THROWS_AS(scene_graph_from_json(doc), SchemaError);

  doc = base_scene(4, 4);
  doc["rooms"].push_back(room_doc(1, "a", 4));
  doc["rooms"][0]["corner_pref"] = "north";
  CHECK_THROWS_AS(scene_graph_from_json(doc), SchemaError);
}

TEST_CASE("reference and capacity violations") {
  // Furniture footprint exceeding the room target.
  json doc = base_scene(5, 5);
  json room = room_doc(1, "study", 4);
  room["furniture"].push_back(furniture_doc(1, "desk", 3, 2));
  doc["rooms"].push_back(room);
  CHECK_THROWS_AS(scene_graph_from_json(doc), CapacityError);

  // Room targets exceeding the indoor area.
  doc = base_scene(4, 4);
  doc["rooms"].push_back(room_doc(1, "a", 10));
  doc["rooms"].push_back(room_doc(2, "b", 10));
  CHECK_THROWS_AS(scene_graph_from_json(doc), CapacityError);

  // Non-contiguous room ids.
  doc = base_scene(4, 4);
  doc["rooms"].push_back(room_doc(1, "a", 3));
  doc["rooms"].push_back(room_doc(3, "b", 3));
  CHECK_THROWS_AS(scene_graph_from_json(doc), ReferenceError);

  // Constraint referencing an unknown room.
  doc = base_scene(4, 4);
  doc["rooms"].push_back(room_doc(1, "a", 3));
  doc["constraints"]["adjacency_pairs"] = {{1, 9}};
  CHECK_THROWS_AS(scene_graph_from_json(doc), ReferenceError);

  // Privacy order listing a room twice.
  doc = base_scene(4, 4);
  doc["rooms"].push_back(room_doc(1, "a", 3));
  doc["rooms"].push_back(room_doc(2, "b", 3));
  doc["constraints"]["privacy_order"] = {1, 2, 1};
  CHECK_THROWS_AS(scene_graph_from_json(doc), ReferenceError);

  // Facing pair referencing a missing item.
  doc = base_scene(5, 5);
  room = room_doc(1, "studio", 9);
  room["furniture"].push_back(furniture_doc(1, "sofa", 2, 1));
  doc["rooms"].push_back(room);
  doc["constraints"]["facing_pairs"] = {{1, 1, 2}};
  CHECK_THROWS_AS(scene_graph_from_json(doc), ReferenceError);
}

TEST_CASE("entrance placement diagnostics") {
  json doc = base_scene(4, 4);
  doc["floor"]["entrance"] = {1, 1};  // interior cell, all neighbors indoor
  CHECK_THROWS_WITH_AS(scene_graph_from_json(doc),
                       doctest::Contains("EntranceNotOnBoundary"), SchemaError);

  // Carving the neighborhood makes the same cell acceptable.
  doc["floor"]["outdoor_cells"] = {{1, 2}};
  CHECK_NOTHROW(scene_graph_from_json(doc));

  doc = base_scene(4, 4);
  doc["floor"]["outdoor_cells"] = {{0, 0}};
  doc["floor"]["entrance"] = {0, 0};
  CHECK_THROWS_WITH_AS(scene_graph_from_json(doc),
                       doctest::Contains("entrance"), SchemaError);
}

TEST_CASE("validate_scene_graph warnings are non-fatal") {
  json doc = base_scene(6, 6);
  json room = room_doc(1, "den", 6);
  // 4x4 cannot fit in a target-area square of side 2 in either orientation.
  room["furniture"] = {furniture_doc(1, "rug", 2, 3)};
  room["target_area_cells"] = 6;
  doc["rooms"].push_back(room);
  SceneGraph sg = scene_graph_from_json(doc);

  sg.rooms[0].furniture[0].width_cells = 3;
  sg.rooms[0].furniture[0].length_cells = 3;
  sg.rooms[0].target_area_cells = 9;  // floor(sqrt(9)) = 3, so 3x3 still fits
  auto diags = validate_scene_graph(sg);
  for (const auto& d : diags) CHECK_FALSE(d.fatal);

  sg.rooms[0].furniture[0].width_cells = 4;
  sg.rooms[0].furniture[0].length_cells = 4;
  sg.rooms[0].target_area_cells = 16;
  sg.weights.rect = 0.5;  // rect <= aspect + bal/2 triggers the regime warning
  diags = validate_scene_graph(sg);
  bool saw_loose = false, saw_infeasible = false;
  for (const auto& d : diags) {
    CHECK_FALSE(d.fatal);
    if (d.code == "LooseBoundingBoxRegime") saw_loose = true;
    if (d.code == "LikelyInfeasibleFurniture") saw_infeasible = true;
  }
  CHECK(saw_loose);
  CHECK_FALSE(saw_infeasible);  // 4x4 fits the side-4 square of target 16

  sg.rooms[0].target_area_cells = 15;  // side 3: now 4x4 cannot fit
  sg.rooms[0].furniture[0].width_cells = 4;
  diags = validate_scene_graph(sg);
  saw_infeasible = false;
  for (const auto& d : diags) {
    if (d.code == "LikelyInfeasibleFurniture") saw_infeasible = true;
  }
  CHECK(saw_infeasible);
}

TEST_CASE("corner helpers") {
  CHECK(corner_cell(CornerPref::NW, 6, 5) == Cell{0, 4});
  CHECK(corner_cell(CornerPref::NE, 6, 5) == Cell{5, 4});
  CHECK(corner_cell(CornerPref::SW, 6, 5) == Cell{0, 0});
  CHECK(corner_cell(CornerPref::SE, 6, 5) == Cell{5, 0});
  CHECK(corner_from_name("NE") == CornerPref::NE);
  CHECK_FALSE(corner_from_name("XX").has_value());
  for (CornerPref c : {CornerPref::NW, CornerPref::NE, CornerPref::SW,
                       CornerPref::SE}) {
    CHECK(corner_from_name(corner_name(c)) == c);
  }
}

TEST_CASE("default weights match the shipped config file") {
  ObjectiveWeights defaults;
  ObjectiveWeights from_file =
      load_weights_file(repo_path("configs/config.default.json"));
  CHECK(from_file.rect == defaults.rect);
  CHECK(from_file.perim == defaults.perim);
  CHECK(from_file.area == defaults.area);
  CHECK(from_file.aspect == defaults.aspect);
  CHECK(from_file.rel == defaults.rel);
  CHECK(from_file.bal == defaults.bal);
  CHECK(from_file.priv == defaults.priv);
  CHECK(from_file.ref == defaults.ref);
}

TEST_CASE("handcrafted oracle scenes parse cleanly") {
  for (const char* name :
       {"l_shaped_room", "off_center_furniture", "violated_privacy_order"}) {
    std::string path =
        repo_path(std::string("tests/fixtures/handcrafted/") + name + ".scene.json");
    SceneGraph sg = parse_scene_graph(testsupport::read_file(path));
    CHECK(!sg.rooms.empty());
    for (const auto& d : validate_scene_graph(sg)) CHECK_FALSE(d.fatal);
  }
}
