#include <doctest.h>

#include "gridplan/common.hpp"
#include "gridplan/layout.hpp"
#include "test_support.hpp"

using namespace gridplan;
using testsupport::read_file;
using testsupport::repo_path;

TEST_CASE("layout files round-trip") {
  std::string text = read_file(
      repo_path("tests/fixtures/handcrafted/off_center_furniture.layout.json"));
  LayoutFile file = parse_layout(text);
  const Layout& layout = file.layout;

  CHECK(layout.width == 4);
  CHECK(layout.length == 4);
  CHECK(layout.label({0, 0}) == Layout::kCorridor);
  CHECK(layout.label({1, 1}) == 1);
  REQUIRE(layout.furniture.size() == 2);
  CHECK(layout.furniture[0].origin == Cell{1, 1});
  CHECK(layout.furniture[0].len_i == 2);
  CHECK(layout.furniture[0].len_j == 1);
  CHECK(layout.furniture_covers({2, 1}));
  CHECK_FALSE(layout.furniture_covers({3, 1}));

  // Closed rooms are never traversable; the corridor always is.
  CHECK(layout.is_q_cell(file.scene, {0, 0}));
  CHECK_FALSE(layout.is_q_cell(file.scene, {1, 1}));

  std::string again = serialize_layout(file.scene, layout);
  LayoutFile file2 = parse_layout(again);
  CHECK(serialize_layout(file2.scene, file2.layout) == again);
}

TEST_CASE("layout validation failures") {
  std::string text = read_file(
      repo_path("tests/fixtures/handcrafted/l_shaped_room.layout.json"));
  json doc = json::parse(text);

  SUBCASE("missing cell") {
    doc["cells"].erase(0);
    CHECK_THROWS_AS(layout_from_json(doc), SchemaError);
  }
  SUBCASE("duplicate cell") {
    doc["cells"].push_back(doc["cells"][0]);
    CHECK_THROWS_AS(layout_from_json(doc), SchemaError);
  }
  SUBCASE("unknown room label") {
    doc["cells"][0]["label"] = "room:9";
    CHECK_THROWS_AS(layout_from_json(doc), ReferenceError);
  }
  SUBCASE("garbled label") {
    doc["cells"][0]["label"] = "hallway";
    CHECK_THROWS_AS(layout_from_json(doc), SchemaError);
  }
  SUBCASE("bad nu") {
    doc["furniture"] = {{{"room", 1},
                         {"id", 1},
                         {"origin", {0, 1}},
                         {"dims", {1, 1}},
                         {"nu", {1, 1}}}};
    CHECK_THROWS_AS(layout_from_json(doc), SchemaError);
  }
}

TEST_CASE("open room cells under furniture are not traversable") {
  std::string text = read_file(
      repo_path("tests/fixtures/handcrafted/off_center_furniture.layout.json"));
  LayoutFile file = parse_layout(text);
  file.scene.rooms[0].open = true;
  CHECK(file.layout.is_q_cell(file.scene, {3, 2}));        // bare open-room cell
  CHECK_FALSE(file.layout.is_q_cell(file.scene, {1, 1}));  // under the bed
}
