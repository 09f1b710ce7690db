#include "gridplan/layout.hpp"

#include <algorithm>
#include <cstdlib>

#include "gridplan/common.hpp"
#include "gridplan/grid.hpp"

namespace gridplan {

namespace {

std::string label_string(const SceneGraph& sg, int label) {
  if (label == Layout::kCorridor) return "corridor";
  (void)sg;
  return "room:" + std::to_string(label);
}

int label_from_string(const std::string& s) {
  if (s == "corridor") return Layout::kCorridor;
  if (s.rfind("room:", 0) == 0) {
    try {
      return std::stoi(s.substr(5));
    } catch (const std::exception&) {
    }
  }
  throw SchemaError("unknown cell label '" + s + "'");
}

Direction direction_from_letter(const std::string& s) {
  if (s == "e") return Direction::E;
  if (s == "w") return Direction::W;
  if (s == "s") return Direction::S;
  if (s == "n") return Direction::N;
  throw SchemaError("unknown direction '" + s + "'");
}

json edge_to_json(const EdgeRef& e) {
  return json{{"cell", {e.cell.i, e.cell.j}},
              {"dir", std::string(1, direction_letter(e.dir))}};
}

EdgeRef edge_from_json(const json& doc) {
  EdgeRef e;
  const auto& cell = doc.at("cell");
  e.cell = Cell{cell.at(0).get<int>(), cell.at(1).get<int>()};
  e.dir = direction_from_letter(doc.at("dir").get<std::string>());
  return e;
}

}  // namespace

bool Layout::furniture_covers(Cell c) const {
  for (const auto& box : furniture) {
    if (c.i >= box.origin.i && c.i < box.origin.i + box.len_i &&
        c.j >= box.origin.j && c.j < box.origin.j + box.len_j) {
      return true;
    }
  }
  return false;
}

bool Layout::is_q_cell(const SceneGraph& sg, Cell c) const {
  int lab = label(c);
  if (lab == kOutside) return false;
  if (lab == kCorridor) return true;
  const RoomSpec* room = sg.room_by_id(lab);
  if (room == nullptr || !room->open) return false;
  return !furniture_covers(c);
}

json layout_to_json(const SceneGraph& sg, const Layout& layout) {
  json doc;
  doc["schema_version"] = 1;
  doc["scene"] = scene_graph_to_json(sg);

  json cells = json::array();
  for (int i = 0; i < layout.width; ++i) {
    for (int j = 0; j < layout.length; ++j) {
      int lab = layout.label(Cell{i, j});
      if (lab == Layout::kOutside) continue;
      cells.push_back(json{{"i", i}, {"j", j}, {"label", label_string(sg, lab)}});
    }
  }
  // Sort by (i, j) so files are diffable regardless of construction order.
  std::sort(cells.begin(), cells.end(), [](const json& a, const json& b) {
    int ai = a.at("i").get<int>(), bi = b.at("i").get<int>();
    if (ai != bi) return ai < bi;
    return a.at("j").get<int>() < b.at("j").get<int>();
  });
  doc["cells"] = std::move(cells);

  json furn = json::array();
  auto boxes = layout.furniture;
  std::sort(boxes.begin(), boxes.end(), [](const Layout::Box& a, const Layout::Box& b) {
    if (a.room != b.room) return a.room < b.room;
    return a.id < b.id;
  });
  for (const auto& box : boxes) {
    furn.push_back(json{{"room", box.room},
                        {"id", box.id},
                        {"origin", {box.origin.i, box.origin.j}},
                        {"dims", {box.len_i, box.len_j}},
                        {"nu", {box.nu_i, box.nu_j}}});
  }
  doc["furniture"] = std::move(furn);

  if (!layout.objective_breakdown.empty()) {
    json obj;
    for (const auto& [name, value] : layout.objective_breakdown) obj[name] = value;
    doc["objective"] = std::move(obj);
  }

  if (layout.artifacts.has_value()) {
    const auto& art = *layout.artifacts;
    json walls = json::array();
    for (const auto& w : art.walls) {
      json entry = edge_to_json(w.edge);
      entry["exterior"] = w.exterior;
      walls.push_back(std::move(entry));
    }
    json doors = json::array();
    for (const auto& d : art.doors) {
      json entry = edge_to_json(d.edge);
      entry["room"] = d.room;
      entry["kind"] = d.kind;
      doors.push_back(std::move(entry));
    }
    json windows = json::array();
    for (const auto& w : art.windows) {
      json entry = edge_to_json(w.edge);
      entry["space"] = w.space;
      windows.push_back(std::move(entry));
    }
    doc["artifacts"] = json{{"walls", std::move(walls)},
                            {"doors", std::move(doors)},
                            {"windows", std::move(windows)}};
  }
  return doc;
}

std::string serialize_layout(const SceneGraph& sg, const Layout& layout) {
  return layout_to_json(sg, layout).dump(2) + "\n";
}

LayoutFile layout_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("layout document must be a JSON object");
  if (!doc.contains("scene")) throw SchemaError("layout document missing 'scene'");
  LayoutFile out;
  out.scene = scene_graph_from_json(doc.at("scene"));
  const auto& sg = out.scene;

  Layout& layout = out.layout;
  layout.width = sg.floor.width_cells;
  layout.length = sg.floor.length_cells;
  layout.labels.assign(static_cast<size_t>(layout.width) * layout.length,
                       Layout::kOutside);

  Grid grid = make_grid(sg.floor);
  if (!doc.contains("cells") || !doc.at("cells").is_array()) {
    throw SchemaError("layout document missing 'cells' array");
  }
  size_t covered = 0;
  for (const auto& entry : doc.at("cells")) {
    Cell c{entry.at("i").get<int>(), entry.at("j").get<int>()};
    if (!grid.indoor(c)) {
      throw SchemaError("layout labels cell (" + std::to_string(c.i) + "," +
                        std::to_string(c.j) + ") outside the indoor region");
    }
    int lab = label_from_string(entry.at("label").get<std::string>());
    if (lab != Layout::kCorridor && sg.room_by_id(lab) == nullptr) {
      throw ReferenceError("layout labels cell with unknown room id " +
                           std::to_string(lab));
    }
    if (layout.label(c) != Layout::kOutside) {
      throw SchemaError("layout labels cell (" + std::to_string(c.i) + "," +
                        std::to_string(c.j) + ") more than once");
    }
    layout.set_label(c, lab);
    ++covered;
  }
  if (covered != static_cast<size_t>(grid.indoor_count())) {
    throw SchemaError("layout covers " + std::to_string(covered) +
                      " cells but the indoor region has " +
                      std::to_string(grid.indoor_count()));
  }

  if (doc.contains("furniture")) {
    for (const auto& entry : doc.at("furniture")) {
      Layout::Box box;
      box.room = entry.at("room").get<int>();
      box.id = entry.at("id").get<int>();
      const auto& origin = entry.at("origin");
      box.origin = Cell{origin.at(0).get<int>(), origin.at(1).get<int>()};
      const auto& dims = entry.at("dims");
      box.len_i = dims.at(0).get<int>();
      box.len_j = dims.at(1).get<int>();
      const auto& nu = entry.at("nu");
      box.nu_i = nu.at(0).get<int>();
      box.nu_j = nu.at(1).get<int>();
      if (box.len_i < 1 || box.len_j < 1) {
        throw SchemaError("furniture box dims must be positive");
      }
      if (std::abs(box.nu_i) + std::abs(box.nu_j) != 1) {
        throw SchemaError("furniture nu must be one of the four axis units");
      }
      layout.furniture.push_back(box);
    }
  }

  if (doc.contains("objective")) {
    for (const auto& [key, value] : doc.at("objective").items()) {
      layout.objective_breakdown[key] = value.get<double>();
    }
  }

  if (doc.contains("artifacts")) {
    const auto& art_doc = doc.at("artifacts");
    FloorplanArtifacts art;
    if (art_doc.contains("walls")) {
      for (const auto& entry : art_doc.at("walls")) {
        WallSegment w;
        w.edge = edge_from_json(entry);
        w.exterior = entry.value("exterior", false);
        art.walls.push_back(w);
      }
    }
    if (art_doc.contains("doors")) {
      for (const auto& entry : art_doc.at("doors")) {
        Door d;
        d.edge = edge_from_json(entry);
        d.room = entry.at("room").get<int>();
        d.kind = entry.at("kind").get<std::string>();
        art.doors.push_back(d);
      }
    }
    if (art_doc.contains("windows")) {
      for (const auto& entry : art_doc.at("windows")) {
        Window w;
        w.edge = edge_from_json(entry);
        w.space = entry.at("space").get<std::string>();
        art.windows.push_back(w);
      }
    }
    layout.artifacts = std::move(art);
  }
  return out;
}

LayoutFile parse_layout(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw SchemaError(std::string("layout is not valid JSON: ") + err.what());
  }
  return layout_from_json(doc);
}

}  // namespace gridplan
