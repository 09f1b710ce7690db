#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "gridplan/scene_graph.hpp"

namespace testsupport {

inline std::string repo_path(const std::string& rel) {
  return std::string(GRIDPLAN_REPO_DIR) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(static_cast<bool>(in), "cannot open " << path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline nlohmann::json read_json(const std::string& path) {
  return nlohmann::json::parse(read_file(path));
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE_MESSAGE(static_cast<bool>(out), "cannot write " << path);
  out << content;
}

// Minimal valid scene document; tests adjust fields as needed.
inline nlohmann::json base_scene(int width, int length) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["floor"] = {{"width_cells", width},
                  {"length_cells", length},
                  {"cell_size_m", 0.5},
                  {"outdoor_cells", nlohmann::json::array()},
                  {"entrance", {0, 0}}};
  doc["rooms"] = nlohmann::json::array();
  doc["constraints"] = nlohmann::json::object();
  return doc;
}

inline nlohmann::json room_doc(int id, const std::string& name, int target,
                               bool open = false) {
  return nlohmann::json{{"id", id},
                        {"name", name},
                        {"target_area_cells", target},
                        {"open", open},
                        {"furniture", nlohmann::json::array()}};
}

inline nlohmann::json furniture_doc(int id, const std::string& name, int w,
                                    int l, bool against_wall = false) {
  return nlohmann::json{{"id", id},
                        {"name", name},
                        {"width_cells", w},
                        {"length_cells", l},
                        {"against_wall", against_wall}};
}

}  // namespace testsupport
