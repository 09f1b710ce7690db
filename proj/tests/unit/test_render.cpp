#include <doctest.h>

#include <cctype>
#include <string>
#include <vector>

#include "gridplan/grid.hpp"
#include "gridplan/layout.hpp"
#include "gridplan/postprocess.hpp"
#include "gridplan/render.hpp"
#include "gridplan/scene_graph.hpp"
#include "test_support.hpp"

using namespace gridplan;
using testsupport::base_scene;
using testsupport::read_file;
using testsupport::repo_path;
using testsupport::room_doc;

namespace {

size_t count_of(const std::string& hay, const std::string& needle) {
  size_t n = 0;
  for (size_t at = hay.find(needle); at != std::string::npos;
       at = hay.find(needle, at + needle.size())) {
    ++n;
  }
  return n;
}

// Minimal well-formedness check: every open tag closes in order, attributes
// stay out of scope. Enough to catch unbalanced or interleaved elements.
bool xml_balanced(const std::string& text) {
  std::vector<std::string> stack;
  size_t at = 0;
  while ((at = text.find('<', at)) != std::string::npos) {
    size_t end = text.find('>', at);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(at + 1, end - at - 1);
    at = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    bool closing = tag[0] == '/';
    bool self_closing = tag.back() == '/';
    size_t name_start = closing ? 1 : 0;
    size_t name_end = name_start;
    while (name_end < tag.size() &&
           (std::isalnum(static_cast<unsigned char>(tag[name_end])) ||
            tag[name_end] == '-')) {
      ++name_end;
    }
    std::string name = tag.substr(name_start, name_end - name_start);
    if (name.empty()) return false;
    if (closing) {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else if (!self_closing) {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

Layout corridor_layout(int w, int l) {
  Layout layout;
  layout.width = w;
  layout.length = l;
  layout.labels.assign(static_cast<size_t>(w) * l, Layout::kCorridor);
  return layout;
}

}  // namespace

TEST_CASE("corridor-only plan matches the golden file") {
  SceneGraph sg = scene_graph_from_json(base_scene(2, 2));
  Layout layout = corridor_layout(2, 2);
  std::string svg = render_svg(sg, layout);
  CHECK(svg == read_file(repo_path("tests/golden/corridor_2x2.svg")));
  CHECK(xml_balanced(svg));
}

TEST_CASE("rendering is deterministic and well formed") {
  LayoutFile file = parse_layout(read_file(
      repo_path("tests/fixtures/handcrafted/violated_privacy_order.layout.json")));
  Grid grid = make_grid(file.scene.floor);
  file.layout.artifacts = postprocess(file.scene, grid, file.layout, 11);

  RenderStyle style;
  style.legend = true;
  std::string a = render_svg(file.scene, file.layout, style);
  std::string b = render_svg(file.scene, file.layout, style);
  CHECK(a == b);
  CHECK(xml_balanced(a));

  const FloorplanArtifacts& art = *file.layout.artifacts;
  CHECK(count_of(a, "stroke-linecap=\"square\"") == art.walls.size());
  CHECK(count_of(a, "<path d=\"M ") == art.doors.size());
  CHECK(count_of(a, "stroke=\"white\"") == art.windows.size());
}

TEST_CASE("viewBox spans the grid at the cell pixel size") {
  SceneGraph sg = scene_graph_from_json(base_scene(4, 3));
  Layout layout = corridor_layout(4, 3);

  RenderStyle style;
  style.cell_px = 10;
  std::string svg = render_svg(sg, layout, style);
  CHECK(svg.find("viewBox=\"0 0 40 30\"") != std::string::npos);

  style.cell_px = 1;  // below the readable floor, clamps to 4
  svg = render_svg(sg, layout, style);
  CHECK(svg.find("viewBox=\"0 0 16 12\"") != std::string::npos);
}

TEST_CASE("outdoor cells get the cross-hatch pattern") {
  auto doc = base_scene(3, 2);
  doc["floor"]["outdoor_cells"].push_back({2, 1});
  SceneGraph sg = scene_graph_from_json(doc);
  Grid grid = make_grid(sg.floor);
  Layout layout = corridor_layout(3, 2);
  layout.set_label(Cell{2, 1}, Layout::kOutside);

  std::string svg = render_svg(sg, layout);
  CHECK(count_of(svg, "url(#hatch)") == 1);
  CHECK(svg.find("<pattern id=\"hatch\"") != std::string::npos);

  // Hatch-free style and hatch-free layouts skip the pattern definition.
  RenderStyle plain;
  plain.hatch_outdoor = false;
  CHECK(render_svg(sg, layout, plain).find("hatch") == std::string::npos);
  CHECK(render_svg(sg, corridor_layout(3, 2)).find("hatch") ==
        std::string::npos);
}

TEST_CASE("furniture faces its nu direction with a tick") {
  auto doc = base_scene(3, 3);
  auto bedroom = room_doc(1, "bedroom", 9);
  doc["rooms"].push_back(bedroom);
  SceneGraph sg = scene_graph_from_json(doc);
  Layout layout = corridor_layout(3, 3);
  for (int at = 0; at < 9; ++at) layout.labels[static_cast<size_t>(at)] = 1;
  layout.furniture.push_back(Layout::Box{1, 1, Cell{0, 0}, 2, 1, 0, 1});

  std::string svg = render_svg(sg, layout);
  // Box center sits at (24, 60); the tick points north (decreasing svg y).
  CHECK(svg.find("<line x1=\"24\" y1=\"60\" x2=\"24\" y2=\"50.88\"") !=
        std::string::npos);

  layout.furniture[0].nu_i = -1;
  layout.furniture[0].nu_j = 0;
  svg = render_svg(sg, layout);
  CHECK(svg.find("<line x1=\"24\" y1=\"60\" x2=\"2.88\" y2=\"60\"") !=
        std::string::npos);
}

TEST_CASE("room colors follow names, not declaration order") {
  CHECK(room_color("bedroom") == room_color("bedroom"));
  CHECK(room_color("bedroom") != room_color("study"));

  auto doc_a = base_scene(2, 2);
  doc_a["rooms"].push_back(room_doc(1, "bedroom", 2));
  doc_a["rooms"].push_back(room_doc(2, "study", 2));
  auto doc_b = base_scene(2, 2);
  doc_b["rooms"].push_back(room_doc(2, "study", 2));
  doc_b["rooms"].push_back(room_doc(1, "bedroom", 2));

  Layout layout = corridor_layout(2, 2);
  layout.set_label(Cell{0, 1}, 1);
  layout.set_label(Cell{1, 1}, 2);

  CHECK(render_svg(scene_graph_from_json(doc_a), layout) ==
        render_svg(scene_graph_from_json(doc_b), layout));
}
