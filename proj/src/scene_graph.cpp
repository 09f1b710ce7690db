#include "gridplan/scene_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace gridplan {

std::string corner_name(CornerPref c) {
  switch (c) {
    case CornerPref::NW: return "NW";
    case CornerPref::NE: return "NE";
    case CornerPref::SW: return "SW";
    case CornerPref::SE: return "SE";
  }
  return "?";
}

std::optional<CornerPref> corner_from_name(const std::string& name) {
  if (name == "NW") return CornerPref::NW;
  if (name == "NE") return CornerPref::NE;
  if (name == "SW") return CornerPref::SW;
  if (name == "SE") return CornerPref::SE;
  return std::nullopt;
}

Cell corner_cell(CornerPref c, int width, int length) {
  switch (c) {
    case CornerPref::NW: return {0, length - 1};
    case CornerPref::NE: return {width - 1, length - 1};
    case CornerPref::SW: return {0, 0};
    case CornerPref::SE: return {width - 1, 0};
  }
  return {0, 0};
}

const RoomSpec* SceneGraph::room_by_id(int k) const {
  for (const auto& r : rooms) {
    if (r.id == k) return &r;
  }
  return nullptr;
}

const FurnitureSpec* SceneGraph::furniture_by_id(int k, int l) const {
  const RoomSpec* r = room_by_id(k);
  if (!r) return nullptr;
  for (const auto& f : r->furniture) {
    if (f.id == l) return &f;
  }
  return nullptr;
}

namespace {

const json& require_field(const json& obj, const char* key,
                          const std::string& ctx) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw SchemaError(ctx + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

int get_int(const json& obj, const char* key, const std::string& ctx) {
  const json& v = require_field(obj, key, ctx);
  if (!v.is_number_integer()) {
    throw SchemaError(ctx + ": field '" + key + "' must be an integer");
  }
  return v.get<int>();
}

double get_real(const json& obj, const char* key, const std::string& ctx) {
  const json& v = require_field(obj, key, ctx);
  if (!v.is_number()) {
    throw SchemaError(ctx + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

std::string get_string(const json& obj, const char* key,
                       const std::string& ctx) {
  const json& v = require_field(obj, key, ctx);
  if (!v.is_string()) {
    throw SchemaError(ctx + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

bool get_bool(const json& obj, const char* key, const std::string& ctx,
              bool fallback, bool required) {
  if (!obj.contains(key)) {
    if (required) throw SchemaError(ctx + ": missing field '" + key + "'");
    return fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_boolean()) {
    throw SchemaError(ctx + ": field '" + key + "' must be a boolean");
  }
  return v.get<bool>();
}

Cell get_cell(const json& v, const std::string& ctx) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
      !v[1].is_number_integer()) {
    throw SchemaError(ctx + ": expected a [i, j] integer pair");
  }
  return {v[0].get<int>(), v[1].get<int>()};
}

ObjectiveWeights weights_from_json(const json& w, const std::string& ctx,
                                   bool all_required) {
  ObjectiveWeights out;
  struct Key {
    const char* name;
    double ObjectiveWeights::* field;
  };
  const Key keys[] = {
      {"rect", &ObjectiveWeights::rect},   {"perim", &ObjectiveWeights::perim},
      {"area", &ObjectiveWeights::area},   {"aspect", &ObjectiveWeights::aspect},
      {"rel", &ObjectiveWeights::rel},     {"bal", &ObjectiveWeights::bal},
      {"priv", &ObjectiveWeights::priv},   {"ref", &ObjectiveWeights::ref},
  };
  for (const Key& key : keys) {
    if (w.contains(key.name)) {
      const json& v = w.at(key.name);
      if (!v.is_number()) {
        throw SchemaError(ctx + ": weight '" + std::string(key.name) +
                          "' must be a number");
      }
      out.*(key.field) = v.get<double>();
    } else if (all_required) {
      throw SchemaError(ctx + ": missing weight '" + std::string(key.name) +
                        "'");
    }
  }
  return out;
}

}  // namespace

SceneGraph scene_graph_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("document: not a JSON object");
  int version = get_int(doc, "schema_version", "document");
  if (version != 1) {
    throw SchemaError("document: unsupported schema_version " +
                      std::to_string(version));
  }

  SceneGraph sg;
  const json& floor = require_field(doc, "floor", "document");
  sg.floor.width_cells = get_int(floor, "width_cells", "floor");
  sg.floor.length_cells = get_int(floor, "length_cells", "floor");
  sg.floor.cell_size_m = get_real(floor, "cell_size_m", "floor");
  const json& outdoor = require_field(floor, "outdoor_cells", "floor");
  if (!outdoor.is_array()) {
    throw SchemaError("floor: outdoor_cells must be an array");
  }
  for (const json& c : outdoor) {
    sg.floor.outdoor_cells.push_back(get_cell(c, "floor.outdoor_cells"));
  }
  sg.floor.entrance = get_cell(require_field(floor, "entrance", "floor"),
                               "floor.entrance");

  const json& rooms = require_field(doc, "rooms", "document");
  if (!rooms.is_array()) throw SchemaError("document: rooms must be an array");
  for (const json& rj : rooms) {
    RoomSpec room;
    std::string ctx = "room";
    room.id = get_int(rj, "id", ctx);
    ctx = "room " + std::to_string(room.id);
    room.name = get_string(rj, "name", ctx);
    room.target_area_cells = get_int(rj, "target_area_cells", ctx);
    room.open = get_bool(rj, "open", ctx, false, false);
    if (rj.contains("corner_pref") && !rj.at("corner_pref").is_null()) {
      std::string name = get_string(rj, "corner_pref", ctx);
      auto corner = corner_from_name(name);
      if (!corner) {
        throw SchemaError(ctx + ": corner_pref '" + name +
                          "' is not one of NW/NE/SW/SE");
      }
      room.corner_pref = corner;
    }
    if (rj.contains("furniture")) {
      const json& fs = rj.at("furniture");
      if (!fs.is_array()) throw SchemaError(ctx + ": furniture must be an array");
      for (const json& fj : fs) {
        FurnitureSpec item;
        item.id = get_int(fj, "id", ctx + " furniture");
        std::string fctx = ctx + " furniture " + std::to_string(item.id);
        item.name = get_string(fj, "name", fctx);
        item.width_cells = get_int(fj, "width_cells", fctx);
        item.length_cells = get_int(fj, "length_cells", fctx);
        item.against_wall = get_bool(fj, "against_wall", fctx, false, false);
        room.furniture.push_back(std::move(item));
      }
    }
    sg.rooms.push_back(std::move(room));
  }

  if (doc.contains("constraints")) {
    const json& cs = doc.at("constraints");
    if (!cs.is_object()) {
      throw SchemaError("document: constraints must be an object");
    }
    if (cs.contains("adjacency_pairs")) {
      for (const json& p : cs.at("adjacency_pairs")) {
        if (!p.is_array() || p.size() != 2) {
          throw SchemaError("constraints.adjacency_pairs: expected [k, m]");
        }
        sg.constraints.adjacency_pairs.push_back(
            {p[0].get<int>(), p[1].get<int>()});
      }
    }
    if (cs.contains("privacy_order")) {
      for (const json& k : cs.at("privacy_order")) {
        if (!k.is_number_integer()) {
          throw SchemaError("constraints.privacy_order: expected room ids");
        }
        sg.constraints.privacy_order.push_back(k.get<int>());
      }
    }
    auto read_pairs = [&cs](const char* key, std::vector<FurniturePair>& out) {
      if (!cs.contains(key)) return;
      for (const json& p : cs.at(key)) {
        if (!p.is_array() || p.size() != 3) {
          throw SchemaError(std::string("constraints.") + key +
                            ": expected [room, l1, l2]");
        }
        out.push_back({p[0].get<int>(), p[1].get<int>(), p[2].get<int>()});
      }
    };
    read_pairs("alignment_pairs", sg.constraints.alignment_pairs);
    read_pairs("facing_pairs", sg.constraints.facing_pairs);
    if (cs.contains("relative_offsets")) {
      for (const json& p : cs.at("relative_offsets")) {
        if (!p.is_array() || p.size() != 5) {
          throw SchemaError(
              "constraints.relative_offsets: expected [room, l1, l2, di, dj]");
        }
        sg.constraints.relative_offsets.push_back(
            {p[0].get<int>(), p[1].get<int>(), p[2].get<int>(),
             p[3].get<int>(), p[4].get<int>()});
      }
    }
  }

  if (doc.contains("weights")) {
    sg.weights = weights_from_json(doc.at("weights"), "weights", false);
  }
  if (doc.contains("metadata")) sg.metadata = doc.at("metadata");

  // Accept iff no fatal diagnostic; surface the first one as a typed error.
  for (const Diagnostic& d : validate_scene_graph(sg)) {
    if (!d.fatal) continue;
    if (d.code == "CapacityError") throw CapacityError(d.message);
    if (d.code == "ReferenceError") throw ReferenceError(d.message);
    throw SchemaError(d.code + ": " + d.message);
  }
  return sg;
}

SceneGraph parse_scene_graph(const std::string& document) {
  json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded()) {
    throw SchemaError("document: not valid JSON");
  }
  return scene_graph_from_json(doc);
}

std::vector<Diagnostic> validate_scene_graph(const SceneGraph& sg) {
  std::vector<Diagnostic> out;
  auto fatal = [&out](const std::string& code, const std::string& msg) {
    out.push_back({code, msg, true});
  };
  auto warn = [&out](const std::string& code, const std::string& msg) {
    out.push_back({code, msg, false});
  };

  const FloorSpec& fl = sg.floor;
  if (fl.width_cells < 2 || fl.length_cells < 2) {
    fatal("SchemaError", "floor must be at least 2x2 cells");
    return out;  // later geometry checks assume sane extents
  }
  if (!(fl.cell_size_m > 0)) {
    fatal("SchemaError", "cell_size_m must be positive");
  }
  std::set<std::pair<int, int>> outdoor_set;
  for (Cell c : fl.outdoor_cells) {
    if (c.i < 0 || c.i >= fl.width_cells || c.j < 0 || c.j >= fl.length_cells) {
      fatal("SchemaError", "outdoor cell (" + std::to_string(c.i) + "," +
                               std::to_string(c.j) + ") outside the grid");
      return out;
    }
    outdoor_set.insert({c.i, c.j});
  }
  if (static_cast<long long>(outdoor_set.size()) ==
      static_cast<long long>(fl.width_cells) * fl.length_cells) {
    fatal("SchemaError", "every cell is outdoor");
    return out;
  }

  const Cell entrance = fl.entrance;
  if (entrance.i < 0 || entrance.i >= fl.width_cells || entrance.j < 0 ||
      entrance.j >= fl.length_cells ||
      outdoor_set.count({entrance.i, entrance.j})) {
    fatal("EntranceOutdoor", "entrance cell is not indoor");
    return out;
  }

  Grid grid = make_grid(fl);
  if (!grid.has_void_neighbor(fl.entrance)) {
    fatal("EntranceNotOnBoundary",
          "entrance (" + std::to_string(fl.entrance.i) + "," +
              std::to_string(fl.entrance.j) +
              ") has all four neighbors indoor");
  }

  std::set<int> ids;
  long long total_target = 0;
  for (const RoomSpec& room : sg.rooms) {
    std::string who = "room " + std::to_string(room.id) + " ('" + room.name +
                      "')";
    ids.insert(room.id);
    if (room.target_area_cells < 1) {
      fatal("SchemaError", who + ": target_area_cells must be >= 1");
    }
    total_target += room.target_area_cells;

    std::set<int> fids;
    int footprint = 0;
    for (const FurnitureSpec& item : room.furniture) {
      fids.insert(item.id);
      if (item.width_cells < 1 || item.length_cells < 1) {
        fatal("SchemaError", who + " furniture " + std::to_string(item.id) +
                                 ": dimensions must be >= 1");
        continue;
      }
      footprint += item.footprint();
      // Heuristic: an item that cannot fit inside the square of the room's
      // target area in either orientation is very likely unplaceable.
      int side = static_cast<int>(std::floor(
          std::sqrt(static_cast<double>(room.target_area_cells))));
      int small = std::min(item.width_cells, item.length_cells);
      int large = std::max(item.width_cells, item.length_cells);
      if (small > side && large > side) {
        warn("LikelyInfeasibleFurniture",
             who + " furniture '" + item.name + "' (" +
                 std::to_string(item.width_cells) + "x" +
                 std::to_string(item.length_cells) +
                 ") exceeds the room's target-area square in both dimensions");
      }
    }
    if (static_cast<int>(fids.size()) != static_cast<int>(room.furniture.size())) {
      fatal("ReferenceError", who + ": duplicate furniture ids");
    } else if (!room.furniture.empty() &&
               (*fids.begin() != 1 ||
                *fids.rbegin() != static_cast<int>(room.furniture.size()))) {
      fatal("ReferenceError", who + ": furniture ids must be 1..N_k");
    }
    if (footprint > room.target_area_cells) {
      fatal("CapacityError",
            who + ": furniture footprint " + std::to_string(footprint) +
                " exceeds target area " +
                std::to_string(room.target_area_cells));
    }
  }

  if (static_cast<int>(ids.size()) != static_cast<int>(sg.rooms.size())) {
    fatal("ReferenceError", "duplicate room ids");
  } else if (!sg.rooms.empty() &&
             (*ids.begin() != 1 ||
              *ids.rbegin() != static_cast<int>(sg.rooms.size()))) {
    fatal("ReferenceError", "room ids must be 1..N with no gaps");
  }
  if (total_target > grid.indoor_count()) {
    fatal("CapacityError", "room target areas total " +
                               std::to_string(total_target) +
                               " cells but the indoor region has only " +
                               std::to_string(grid.indoor_count()));
  }

  auto check_room_ref = [&](int k, const std::string& where) {
    if (!sg.room_by_id(k)) {
      fatal("ReferenceError",
            where + ": unknown room id " + std::to_string(k));
      return false;
    }
    return true;
  };
  auto check_furniture_pair = [&](const FurniturePair& p,
                                  const std::string& where) {
    if (!check_room_ref(p.room, where)) return;
    if (!sg.furniture_by_id(p.room, p.l1) || !sg.furniture_by_id(p.room, p.l2)) {
      fatal("ReferenceError", where + ": unknown furniture id in room " +
                                  std::to_string(p.room));
      return;
    }
    if (p.l1 == p.l2) {
      fatal("ReferenceError", where + ": pair references the same item twice");
    }
  };

  for (const AdjacencyPair& p : sg.constraints.adjacency_pairs) {
    check_room_ref(p.k, "adjacency_pairs");
    check_room_ref(p.m, "adjacency_pairs");
    if (p.k == p.m) {
      fatal("ReferenceError", "adjacency_pairs: self-pair (" +
                                  std::to_string(p.k) + "," +
                                  std::to_string(p.m) + ")");
    }
  }
  std::set<int> seen_privacy;
  for (int k : sg.constraints.privacy_order) {
    check_room_ref(k, "privacy_order");
    if (!seen_privacy.insert(k).second) {
      fatal("ReferenceError",
            "privacy_order: room " + std::to_string(k) + " listed twice");
    }
  }
  for (const FurniturePair& p : sg.constraints.alignment_pairs) {
    check_furniture_pair(p, "alignment_pairs");
  }
  for (const FurniturePair& p : sg.constraints.facing_pairs) {
    check_furniture_pair(p, "facing_pairs");
  }
  for (const RelativeOffset& r : sg.constraints.relative_offsets) {
    check_furniture_pair({r.room, r.l1, r.l2}, "relative_offsets");
  }

  const ObjectiveWeights& w = sg.weights;
  for (double v : {w.rect, w.perim, w.area, w.aspect, w.rel, w.bal, w.priv,
                   w.ref}) {
    if (!(v >= 0) || !std::isfinite(v)) {
      fatal("SchemaError", "objective weights must be finite and >= 0");
      break;
    }
  }
  // recompute_objective evaluates bounding-box terms on the tight box; the
  // solver is only guaranteed to keep boxes tight when inflating one never
  // pays, i.e. when rect outweighs aspect + bal/2.
  if (w.rect <= w.aspect + 0.5 * w.bal) {
    warn("LooseBoundingBoxRegime",
         "weights.rect <= weights.aspect + weights.bal/2; solver bounding "
         "boxes may legally inflate and objective re-evaluation can disagree");
  }

  for (const RoomSpec& room : sg.rooms) {
    if (room.corner_pref) {
      Cell c = corner_cell(*room.corner_pref, fl.width_cells, fl.length_cells);
      if (!grid.indoor(c)) {
        warn("CornerOutdoor", "room " + std::to_string(room.id) +
                                  ": preferred corner cell is outdoor; "
                                  "model build will fail");
      }
    }
  }
  return out;
}

json scene_graph_to_json(const SceneGraph& sg) {
  json floor;
  floor["width_cells"] = sg.floor.width_cells;
  floor["length_cells"] = sg.floor.length_cells;
  floor["cell_size_m"] = sg.floor.cell_size_m;
  json outdoor = json::array();
  std::vector<Cell> cells = sg.floor.outdoor_cells;
  std::sort(cells.begin(), cells.end());
  for (Cell c : cells) outdoor.push_back({c.i, c.j});
  floor["outdoor_cells"] = std::move(outdoor);
  floor["entrance"] = {sg.floor.entrance.i, sg.floor.entrance.j};

  json rooms = json::array();
  for (const RoomSpec& room : sg.rooms) {
    json rj;
    rj["id"] = room.id;
    rj["name"] = room.name;
    rj["target_area_cells"] = room.target_area_cells;
    rj["open"] = room.open;
    if (room.corner_pref) rj["corner_pref"] = corner_name(*room.corner_pref);
    json fs = json::array();
    for (const FurnitureSpec& item : room.furniture) {
      json fj;
      fj["id"] = item.id;
      fj["name"] = item.name;
      fj["width_cells"] = item.width_cells;
      fj["length_cells"] = item.length_cells;
      fj["against_wall"] = item.against_wall;
      fs.push_back(std::move(fj));
    }
    rj["furniture"] = std::move(fs);
    rooms.push_back(std::move(rj));
  }

  json cs;
  json adjacency = json::array();
  for (const AdjacencyPair& p : sg.constraints.adjacency_pairs) {
    adjacency.push_back({p.k, p.m});
  }
  cs["adjacency_pairs"] = std::move(adjacency);
  cs["privacy_order"] = sg.constraints.privacy_order;
  auto pair_array = [](const std::vector<FurniturePair>& pairs) {
    json out = json::array();
    for (const FurniturePair& p : pairs) out.push_back({p.room, p.l1, p.l2});
    return out;
  };
  cs["alignment_pairs"] = pair_array(sg.constraints.alignment_pairs);
  cs["facing_pairs"] = pair_array(sg.constraints.facing_pairs);
  json rel = json::array();
  for (const RelativeOffset& r : sg.constraints.relative_offsets) {
    rel.push_back({r.room, r.l1, r.l2, r.di, r.dj});
  }
  cs["relative_offsets"] = std::move(rel);

  json w;
  w["rect"] = sg.weights.rect;
  w["perim"] = sg.weights.perim;
  w["area"] = sg.weights.area;
  w["aspect"] = sg.weights.aspect;
  w["rel"] = sg.weights.rel;
  w["bal"] = sg.weights.bal;
  w["priv"] = sg.weights.priv;
  w["ref"] = sg.weights.ref;

  json doc;
  doc["schema_version"] = 1;
  doc["floor"] = std::move(floor);
  doc["rooms"] = std::move(rooms);
  doc["constraints"] = std::move(cs);
  doc["weights"] = std::move(w);
  if (!sg.metadata.is_null()) doc["metadata"] = sg.metadata;
  return doc;
}

std::string serialize_scene_graph(const SceneGraph& sg) {
  return scene_graph_to_json(sg).dump(2) + "\n";
}

std::string scene_digest(const SceneGraph& sg) {
  uint64_t h = fnv1a64(serialize_scene_graph(sg));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

Grid make_grid(const FloorSpec& floor) {
  return Grid(floor.width_cells, floor.length_cells, floor.outdoor_cells,
              floor.entrance);
}

ObjectiveWeights load_weights_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open weights file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) {
    throw SchemaError("weights file is not valid JSON: " + path);
  }
  return weights_from_json(doc, path, true);
}

}  // namespace gridplan
