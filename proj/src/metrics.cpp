#include "gridplan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace gridplan {

namespace {

double overlap_1d(double a_lo, double a_hi, double b_lo, double b_hi) {
  return std::max(0.0, std::min(a_hi, b_hi) - std::max(a_lo, b_lo));
}

double intersection_area(const BoxScene::Rect& a, const BoxScene::Rect& b) {
  return overlap_1d(a.min_x, a.max_x, b.min_x, b.max_x) *
         overlap_1d(a.min_y, a.max_y, b.min_y, b.max_y);
}

// Area of the union of `rects`, all already clipped to one object. Room rects
// from imported scenes may overlap each other, so this cannot just sum them;
// coordinate compression keeps it exact for the handful of rects involved.
double union_area(const std::vector<BoxScene::Rect>& rects) {
  std::vector<double> xs, ys;
  for (const auto& r : rects) {
    if (r.min_x >= r.max_x || r.min_y >= r.max_y) continue;
    xs.push_back(r.min_x);
    xs.push_back(r.max_x);
    ys.push_back(r.min_y);
    ys.push_back(r.max_y);
  }
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  double total = 0.0;
  for (size_t a = 0; a + 1 < xs.size(); ++a) {
    for (size_t b = 0; b + 1 < ys.size(); ++b) {
      double cx = (xs[a] + xs[a + 1]) / 2;
      double cy = (ys[b] + ys[b + 1]) / 2;
      for (const auto& r : rects) {
        if (cx > r.min_x && cx < r.max_x && cy > r.min_y && cy < r.max_y) {
          total += (xs[a + 1] - xs[a]) * (ys[b + 1] - ys[b]);
          break;
        }
      }
    }
  }
  return total;
}

double total_object_area(const BoxScene& scene) {
  double total = 0.0;
  for (const auto& obj : scene.objects) total += obj.area();
  return total;
}

BoxScene::Rect rect_from_json(const json& v, const char* label_key,
                              const std::string& ctx) {
  if (!v.is_object()) throw SchemaError(ctx + ": expected an object");
  for (const char* key : {label_key, "min", "max"}) {
    if (!v.contains(key)) {
      throw SchemaError(ctx + ": missing field '" + key + "'");
    }
  }
  if (!v.at(label_key).is_string()) {
    throw SchemaError(ctx + ": field '" + std::string(label_key) +
                      "' must be a string");
  }
  auto point = [&ctx](const json& p, const char* key, double& x, double& y) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
        !p[1].is_number()) {
      throw SchemaError(ctx + ": field '" + key + "' must be an [x, y] pair");
    }
    x = p[0].get<double>();
    y = p[1].get<double>();
  };
  BoxScene::Rect r;
  r.label = v.at(label_key).get<std::string>();
  point(v.at("min"), "min", r.min_x, r.min_y);
  point(v.at("max"), "max", r.max_x, r.max_y);
  for (double c : {r.min_x, r.min_y, r.max_x, r.max_y}) {
    if (!std::isfinite(c)) throw SchemaError(ctx + ": coordinates must be finite");
  }
  if (r.max_x < r.min_x || r.max_y < r.min_y) {
    throw SchemaError(ctx + ": max must not be below min");
  }
  return r;
}

}  // namespace

BoxScene boxscene_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("boxscene: expected an object");
  BoxScene scene;
  for (const char* section : {"rooms", "objects"}) {
    if (!doc.contains(section) || !doc.at(section).is_array()) {
      throw SchemaError(std::string("boxscene: missing array '") + section +
                        "'");
    }
  }
  size_t n = 0;
  for (const json& v : doc.at("rooms")) {
    scene.rooms.push_back(
        rect_from_json(v, "label", "boxscene.rooms[" + std::to_string(n++) + "]"));
  }
  n = 0;
  for (const json& v : doc.at("objects")) {
    scene.objects.push_back(
        rect_from_json(v, "room", "boxscene.objects[" + std::to_string(n++) + "]"));
  }
  return scene;
}

BoxScene parse_boxscene(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("boxscene is not valid JSON");
  return boxscene_from_json(doc);
}

BoxScene to_boxscene(const SceneGraph& sg, const Layout& layout) {
  BoxScene scene;
  for (int j = 0; j < layout.length; ++j) {
    for (int i = 0; i < layout.width; ++i) {
      int lab = layout.label(Cell{i, j});
      if (lab <= Layout::kCorridor) continue;
      const RoomSpec* room = sg.room_by_id(lab);
      if (!room) {
        throw MissingRoom("layout labels room " + std::to_string(lab) +
                          " which the scene does not declare");
      }
      scene.rooms.push_back({room->name, double(i), double(j), double(i + 1),
                             double(j + 1)});
    }
  }
  for (const Layout::Box& box : layout.furniture) {
    const RoomSpec* room = sg.room_by_id(box.room);
    if (!room) {
      throw MissingRoom("furniture box owned by undeclared room " +
                        std::to_string(box.room));
    }
    scene.objects.push_back({room->name, double(box.origin.i),
                             double(box.origin.j),
                             double(box.origin.i + box.len_i),
                             double(box.origin.j + box.len_j)});
  }
  return scene;
}

double oor(const BoxScene& scene) {
  double denom = total_object_area(scene);
  if (denom <= 0.0) return 0.0;
  double overlap = 0.0;
  for (size_t a = 0; a < scene.objects.size(); ++a) {
    for (size_t b = a + 1; b < scene.objects.size(); ++b) {
      overlap += intersection_area(scene.objects[a], scene.objects[b]);
    }
  }
  return 100.0 * overlap / denom;
}

double oob(const BoxScene& scene) {
  std::set<std::string> known;
  for (const auto& room : scene.rooms) known.insert(room.label);

  double denom = total_object_area(scene);
  double outside = 0.0;
  for (const auto& obj : scene.objects) {
    if (!known.count(obj.label)) {
      throw MissingRoom("object owner '" + obj.label +
                        "' matches no room rect");
    }
    std::vector<BoxScene::Rect> clipped;
    for (const auto& room : scene.rooms) {
      if (room.label != obj.label) continue;
      BoxScene::Rect c;
      c.min_x = std::max(obj.min_x, room.min_x);
      c.min_y = std::max(obj.min_y, room.min_y);
      c.max_x = std::min(obj.max_x, room.max_x);
      c.max_y = std::min(obj.max_y, room.max_y);
      if (c.min_x < c.max_x && c.min_y < c.max_y) clipped.push_back(c);
    }
    outside += obj.area() - union_area(clipped);
  }
  if (denom <= 0.0) return 0.0;
  return 100.0 * outside / denom;
}

}  // namespace gridplan
