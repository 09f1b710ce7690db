#include "gridplan/llm_frontend.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <httplib.h>

namespace gridplan {

namespace {

namespace fs = std::filesystem;

int half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

int cells_from_area(double m2, double cell_size_m) {
  return std::max(1, half_up(m2 / (cell_size_m * cell_size_m)));
}

std::string read_text(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ApiError(std::string(what) + " not found: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Models often wrap JSON in a markdown fence even when told not to.
std::string strip_fences(std::string text) {
  auto trim = [](std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    size_t e = s.find_last_not_of(" \t\r\n");
    s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
  };
  trim(text);
  if (text.rfind("```", 0) == 0) {
    size_t eol = text.find('\n');
    text = (eol == std::string::npos) ? "" : text.substr(eol + 1);
    size_t fence = text.rfind("```");
    if (fence != std::string::npos) text = text.substr(0, fence);
    trim(text);
  }
  return text;
}

std::string replace_all(std::string text, const std::string& from,
                        const std::string& to) {
  for (size_t at = text.find(from); at != std::string::npos;
       at = text.find(from, at + to.size())) {
    text.replace(at, from.size(), to);
  }
  return text;
}

struct Problems {
  std::vector<std::string> list;
  void add(std::string msg) { list.push_back(std::move(msg)); }
  bool empty() const { return list.empty(); }
  std::string joined() const {
    std::string out;
    for (const auto& p : list) {
      if (!out.empty()) out += "; ";
      out += p;
    }
    return out;
  }
};

bool positive_number(const json& obj, const char* key, Problems& out) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    out.add(std::string("field '") + key + "' must be a number");
    return false;
  }
  double v = obj.at(key).get<double>();
  if (!std::isfinite(v) || v <= 0) {
    out.add(std::string("field '") + key + "' must be positive and finite");
    return false;
  }
  return true;
}

bool int_pair(const json& v) {
  return v.is_array() && v.size() == 2 && v[0].is_number_integer() &&
         v[1].is_number_integer();
}

std::string nonempty_string(const json& obj, const char* key, Problems& out) {
  if (!obj.contains(key) || !obj.at(key).is_string() ||
      obj.at(key).get<std::string>().empty()) {
    out.add(std::string("field '") + key + "' must be a non-empty string");
    return "";
  }
  return obj.at(key).get<std::string>();
}

// Grid extents implied by a validated basic_info output.
std::pair<int, int> extents_of(const json& basic) {
  double cell = basic.at("cell_size_m").get<double>();
  return {round_dimensions(basic.at("width_m").get<double>(), cell),
          round_dimensions(basic.at("length_m").get<double>(), cell)};
}

std::set<std::string> room_names_of(const json& room_analysis) {
  std::set<std::string> names;
  for (const json& r : room_analysis.at("rooms")) {
    names.insert(r.at("name").get<std::string>());
  }
  return names;
}

void check_basic_info(const json& v, const json&, Problems& out) {
  bool ok = positive_number(v, "width_m", out);
  ok = positive_number(v, "length_m", out) && ok;
  ok = positive_number(v, "cell_size_m", out) && ok;
  if (v.contains("notes") && !v.at("notes").is_string()) {
    out.add("field 'notes' must be a string when present");
  }
  if (ok) {
    auto [w, l] = extents_of(v);
    if (w < 2 || l < 2) {
      out.add("the floor must measure at least 2x2 cells; enlarge the "
              "dimensions or shrink cell_size_m");
    }
  }
}

void check_environment(const json& v, const json&, Problems& out) {
  if (v.contains("corner_preferences")) {
    if (!v.at("corner_preferences").is_array()) {
      out.add("'corner_preferences' must be an array");
    } else {
      for (const json& p : v.at("corner_preferences")) {
        if (!p.is_object()) {
          out.add("each corner preference must be an object");
          continue;
        }
        Problems sub;
        nonempty_string(p, "room", sub);
        std::string corner = nonempty_string(p, "corner", sub);
        if (sub.empty() && !corner_from_name(corner)) {
          sub.add("corner '" + corner + "' is not one of NW/NE/SW/SE");
        }
        for (auto& m : sub.list) out.add("corner_preferences: " + m);
      }
    }
  }
  if (v.contains("privacy_order")) {
    if (!v.at("privacy_order").is_array()) {
      out.add("'privacy_order' must be an array of room names");
    } else {
      std::set<std::string> seen;
      for (const json& name : v.at("privacy_order")) {
        if (!name.is_string() || name.get<std::string>().empty()) {
          out.add("privacy_order entries must be non-empty room names");
        } else if (!seen.insert(name.get<std::string>()).second) {
          out.add("privacy_order lists '" + name.get<std::string>() +
                  "' twice");
        }
      }
    }
  }
  if (v.contains("annotations")) {
    if (!v.at("annotations").is_array()) {
      out.add("'annotations' must be an array");
    } else {
      for (const json& a : v.at("annotations")) {
        Problems sub;
        if (!a.is_object()) {
          out.add("each annotation must be an object");
          continue;
        }
        nonempty_string(a, "room", sub);
        nonempty_string(a, "note", sub);
        for (auto& m : sub.list) out.add("annotations: " + m);
      }
    }
  }
}

void check_outdoor_space(const json& v, const json& context, Problems& out) {
  if (!v.contains("outdoor_cells") || !v.at("outdoor_cells").is_array()) {
    out.add("field 'outdoor_cells' must be an array of [i, j] pairs");
    return;
  }
  auto [w, l] = extents_of(context.at("basic_info"));
  std::set<std::pair<int, int>> cells;
  for (const json& c : v.at("outdoor_cells")) {
    if (!int_pair(c)) {
      out.add("outdoor_cells entries must be [i, j] integer pairs");
      return;
    }
    int i = c[0].get<int>(), j = c[1].get<int>();
    if (i < 0 || i >= w || j < 0 || j >= l) {
      out.add("outdoor cell (" + std::to_string(i) + "," + std::to_string(j) +
              ") is outside the " + std::to_string(w) + "x" +
              std::to_string(l) + " grid");
    }
    cells.insert({i, j});
  }
  if (static_cast<long long>(cells.size()) >=
      static_cast<long long>(w) * l) {
    out.add("every cell is marked outdoor; some floor must remain");
  }
}

void check_entrance(const json& v, const json& context, Problems& out) {
  if (!v.contains("entrance") || !int_pair(v.at("entrance"))) {
    out.add("field 'entrance' must be an [i, j] integer pair");
    return;
  }
  auto [w, l] = extents_of(context.at("basic_info"));
  int i = v.at("entrance")[0].get<int>(), j = v.at("entrance")[1].get<int>();
  if (i < 0 || i >= w || j < 0 || j >= l) {
    out.add("entrance is outside the grid");
    return;
  }
  for (const json& c : context.at("outdoor_space").at("outdoor_cells")) {
    if (c[0].get<int>() == i && c[1].get<int>() == j) {
      out.add("entrance sits on an outdoor cell");
      return;
    }
  }
}

void check_room_analysis(const json& v, const json&, Problems& out) {
  if (!v.contains("rooms") || !v.at("rooms").is_array() ||
      v.at("rooms").empty()) {
    out.add("field 'rooms' must be a non-empty array");
    return;
  }
  std::set<int> ids;
  std::set<std::string> names;
  int count = 0;
  for (const json& r : v.at("rooms")) {
    ++count;
    if (!r.is_object()) {
      out.add("each room must be an object");
      return;
    }
    Problems sub;
    if (!r.contains("id") || !r.at("id").is_number_integer()) {
      sub.add("field 'id' must be an integer");
    } else {
      ids.insert(r.at("id").get<int>());
    }
    std::string name = nonempty_string(r, "name", sub);
    if (!name.empty() && !names.insert(name).second) {
      sub.add("room name '" + name + "' is reused; names must be unique");
    }
    positive_number(r, "target_area_m2", sub);
    if (r.contains("open") && !r.at("open").is_boolean()) {
      sub.add("field 'open' must be a boolean when present");
    }
    for (auto& m : sub.list) out.add("rooms: " + m);
  }
  if (out.empty() &&
      (static_cast<int>(ids.size()) != count || *ids.begin() != 1 ||
       *ids.rbegin() != count)) {
    out.add("room ids must be exactly 1.." + std::to_string(count));
  }
  if (v.contains("adjacency")) {
    if (!v.at("adjacency").is_array()) {
      out.add("'adjacency' must be an array of [nameA, nameB] pairs");
    } else {
      for (const json& p : v.at("adjacency")) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() ||
            !p[1].is_string()) {
          out.add("adjacency entries must be [nameA, nameB] string pairs");
        } else if (!names.count(p[0].get<std::string>()) ||
                   !names.count(p[1].get<std::string>())) {
          out.add("adjacency references an undeclared room name");
        } else if (p[0] == p[1]) {
          out.add("adjacency pairs a room with itself");
        }
      }
    }
  }
}

void check_furniture_analysis(const json& v, const json& context,
                              Problems& out) {
  std::set<std::string> rooms = room_names_of(context.at("room_analysis"));
  std::map<std::string, std::set<int>> ids_by_room;
  std::map<std::string, int> count_by_room;
  if (v.contains("furniture")) {
    if (!v.at("furniture").is_array()) {
      out.add("'furniture' must be an array");
      return;
    }
    for (const json& f : v.at("furniture")) {
      if (!f.is_object()) {
        out.add("each furniture entry must be an object");
        return;
      }
      Problems sub;
      std::string room = nonempty_string(f, "room", sub);
      if (!room.empty() && !rooms.count(room)) {
        sub.add("room '" + room + "' was not declared by room_analysis");
      }
      if (!f.contains("id") || !f.at("id").is_number_integer()) {
        sub.add("field 'id' must be an integer");
      } else if (!room.empty()) {
        ids_by_room[room].insert(f.at("id").get<int>());
        count_by_room[room] += 1;
      }
      nonempty_string(f, "name", sub);
      positive_number(f, "width_m", sub);
      positive_number(f, "length_m", sub);
      if (f.contains("against_wall") && !f.at("against_wall").is_boolean()) {
        sub.add("field 'against_wall' must be a boolean when present");
      }
      for (auto& m : sub.list) out.add("furniture: " + m);
    }
    for (const auto& [room, ids] : ids_by_room) {
      int count = count_by_room[room];
      if (static_cast<int>(ids.size()) != count || *ids.begin() != 1 ||
          *ids.rbegin() != count) {
        out.add("furniture ids in room '" + room + "' must be exactly 1.." +
                std::to_string(count));
      }
    }
  }
  for (const char* key : {"alignment", "facing"}) {
    if (!v.contains(key)) continue;
    if (!v.at(key).is_array()) {
      out.add(std::string("'") + key + "' must be an array");
      continue;
    }
    for (const json& p : v.at(key)) {
      Problems sub;
      if (!p.is_object()) {
        out.add(std::string(key) + " entries must be objects");
        continue;
      }
      std::string room = nonempty_string(p, "room", sub);
      bool ints = p.contains("first") && p.at("first").is_number_integer() &&
                  p.contains("second") && p.at("second").is_number_integer();
      if (!ints) sub.add("fields 'first' and 'second' must be integer ids");
      if (sub.empty()) {
        const auto& ids = ids_by_room[room];
        int a = p.at("first").get<int>(), b = p.at("second").get<int>();
        if (!ids.count(a) || !ids.count(b)) {
          sub.add("references furniture not declared in room '" + room + "'");
        } else if (a == b) {
          sub.add("pairs an item with itself");
        }
      }
      for (auto& m : sub.list) out.add(std::string(key) + ": " + m);
    }
  }
}

using StageChecker = void (*)(const json&, const json&, Problems&);

const std::map<std::string, StageChecker>& stage_checkers() {
  static const std::map<std::string, StageChecker> table = {
      {"basic_info", check_basic_info},
      {"environment", check_environment},
      {"outdoor_space", check_outdoor_space},
      {"entrance", check_entrance},
      {"room_analysis", check_room_analysis},
      {"furniture_analysis", check_furniture_analysis},
  };
  return table;
}

// Stage whose output the assembly error implicates; the pipeline reruns it
// and everything after it.
std::string blame_stage(const std::string& message) {
  auto has = [&message](const char* s) {
    return message.find(s) != std::string::npos;
  };
  if (has("entrance") || has("Entrance")) return "entrance";
  if (has("outdoor")) return "outdoor_space";
  if (has("furniture")) return "furniture_analysis";
  if (has("floor must be") || has("cell_size")) return "basic_info";
  if (has("corner")) return "environment";
  return "room_analysis";
}

json assemble_scene(const std::map<std::string, json>& outputs) {
  const json& basic = outputs.at("basic_info");
  const json& environment = outputs.at("environment");
  const json& outdoor = outputs.at("outdoor_space");
  const json& entrance = outputs.at("entrance");
  const json& room_analysis = outputs.at("room_analysis");
  const json& furniture = outputs.at("furniture_analysis");
  double cell = basic.at("cell_size_m").get<double>();

  std::map<std::string, int> id_by_name;
  for (const json& r : room_analysis.at("rooms")) {
    id_by_name[r.at("name").get<std::string>()] = r.at("id").get<int>();
  }
  auto room_id = [&id_by_name](const json& name, const char* who) {
    auto it = id_by_name.find(name.get<std::string>());
    if (it == id_by_name.end()) {
      throw ReferenceError(std::string(who) + " references room '" +
                           name.get<std::string>() +
                           "' that room_analysis does not define");
    }
    return it->second;
  };

  json doc;
  doc["schema_version"] = 1;
  doc["floor"] = {
      {"width_cells", round_dimensions(basic.at("width_m").get<double>(), cell)},
      {"length_cells",
       round_dimensions(basic.at("length_m").get<double>(), cell)},
      {"cell_size_m", cell},
      {"outdoor_cells", outdoor.at("outdoor_cells")},
      {"entrance", entrance.at("entrance")}};

  std::map<std::string, std::string> corner_by_room;
  if (environment.contains("corner_preferences")) {
    for (const json& p : environment.at("corner_preferences")) {
      room_id(p.at("room"), "environment.corner_preferences");
      corner_by_room[p.at("room").get<std::string>()] =
          p.at("corner").get<std::string>();
    }
  }

  json rooms = json::array();
  for (const json& r : room_analysis.at("rooms")) {
    json room;
    room["id"] = r.at("id");
    room["name"] = r.at("name");
    room["target_area_cells"] =
        cells_from_area(r.at("target_area_m2").get<double>(), cell);
    room["open"] = r.contains("open") && r.at("open").get<bool>();
    auto corner = corner_by_room.find(r.at("name").get<std::string>());
    if (corner != corner_by_room.end()) room["corner_pref"] = corner->second;
    room["furniture"] = json::array();
    rooms.push_back(std::move(room));
  }
  if (furniture.contains("furniture")) {
    for (const json& f : furniture.at("furniture")) {
      int owner = room_id(f.at("room"), "furniture_analysis");
      json item;
      item["id"] = f.at("id");
      item["name"] = f.at("name");
      item["width_cells"] =
          round_dimensions(f.at("width_m").get<double>(), cell);
      item["length_cells"] =
          round_dimensions(f.at("length_m").get<double>(), cell);
      item["against_wall"] =
          f.contains("against_wall") && f.at("against_wall").get<bool>();
      for (json& room : rooms) {
        if (room.at("id").get<int>() == owner) {
          room["furniture"].push_back(std::move(item));
          break;
        }
      }
    }
  }
  doc["rooms"] = std::move(rooms);

  json constraints = json::object();
  if (room_analysis.contains("adjacency")) {
    json pairs = json::array();
    for (const json& p : room_analysis.at("adjacency")) {
      pairs.push_back({room_id(p[0], "adjacency"), room_id(p[1], "adjacency")});
    }
    constraints["adjacency_pairs"] = std::move(pairs);
  }
  if (environment.contains("privacy_order")) {
    json order = json::array();
    for (const json& name : environment.at("privacy_order")) {
      order.push_back(room_id(name, "environment.privacy_order"));
    }
    constraints["privacy_order"] = std::move(order);
  }
  for (const char* key : {"alignment", "facing"}) {
    if (!furniture.contains(key)) continue;
    json pairs = json::array();
    for (const json& p : furniture.at(key)) {
      pairs.push_back({room_id(p.at("room"), key), p.at("first").get<int>(),
                       p.at("second").get<int>()});
    }
    constraints[std::string(key) + "_pairs"] = std::move(pairs);
  }
  doc["constraints"] = std::move(constraints);

  json metadata = json::object();
  if (basic.contains("notes")) metadata["notes"] = basic.at("notes");
  if (environment.contains("annotations")) {
    metadata["annotations"] = environment.at("annotations");
  }
  if (!metadata.empty()) doc["metadata"] = std::move(metadata);
  return doc;
}

class FixtureTransport : public LlmTransport {
 public:
  explicit FixtureTransport(std::string dir) : dir_(std::move(dir)) {}

  std::string complete(const std::string& stage, int attempt,
                       const json&) override {
    fs::path numbered =
        fs::path(dir_) / (stage + ".retry" + std::to_string(attempt - 1) +
                          ".json");
    fs::path base = fs::path(dir_) / (stage + ".json");
    const fs::path& pick =
        (attempt > 1 && fs::exists(numbered)) ? numbered : base;
    return read_text(pick, "fixture reply");
  }

 private:
  std::string dir_;
};

struct SplitUrl {
  std::string base;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ApiError("endpoint '" + url + "' must start with http://");
  }
  if (url.substr(0, scheme_end) != "http") {
    throw ApiError("only http endpoints are supported; front TLS services "
                   "with a local proxy");
  }
  size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/v1/chat/completions"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpTransport : public LlmTransport {
 public:
  explicit HttpTransport(LlmClientConfig cfg) : cfg_(std::move(cfg)) {}

  std::string complete(const std::string& stage, int,
                       const json& request) override {
    if (cfg_.endpoint.empty()) {
      throw ApiError("no endpoint configured; set GRIDPLAN_LLM_ENDPOINT");
    }
    SplitUrl url = split_url(cfg_.endpoint);

    httplib::Headers headers;
    if (!cfg_.key_env.empty()) {
      const char* key = std::getenv(cfg_.key_env.c_str());
      if (!key || !*key) {
        throw ApiError("environment variable " + cfg_.key_env +
                       " is not set (API key)");
      }
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    httplib::Client client(url.base);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(180, 0);
    auto res =
        client.Post(url.path, headers, request.dump(), "application/json");
    if (!res) {
      throw ApiError(stage + ": transport failure contacting " + url.base +
                     ": " + httplib::to_string(res.error()));
    }
    if (res->status == 401 || res->status == 403) {
      throw ApiError(stage + ": authentication rejected (HTTP " +
                     std::to_string(res->status) + ")");
    }
    if (res->status != 200) {
      throw ApiError(stage + ": HTTP " + std::to_string(res->status) + ": " +
                     res->body.substr(0, 300));
    }
    json body = json::parse(res->body, nullptr, false);
    if (body.is_discarded()) {
      throw ApiError(stage + ": response body is not JSON");
    }
    if (!body.contains("choices") || !body.at("choices").is_array() ||
        body.at("choices").empty() ||
        !body.at("choices")[0].contains("message") ||
        !body.at("choices")[0].at("message").contains("content") ||
        !body.at("choices")[0].at("message").at("content").is_string()) {
      throw ApiError(stage + ": response lacks choices[0].message.content");
    }
    return body.at("choices")[0].at("message").at("content")
        .get<std::string>();
  }

 private:
  LlmClientConfig cfg_;
};

std::string prompt_dir_of(const LlmClientConfig& cfg) {
  return cfg.prompt_dir.empty() ? std::string(GRIDPLAN_PROMPTS_DIR)
                                : cfg.prompt_dir;
}

json build_request(const LlmClientConfig& cfg, const std::string& stage,
                   const json& context, const std::string& diagnostics) {
  std::string tmpl =
      read_text(fs::path(prompt_dir_of(cfg)) / (stage + ".md"),
                "prompt template");
  json prior = json::object();
  for (auto& [key, value] : context.items()) {
    if (key != "brief") prior[key] = value;
  }
  std::string rendered = replace_all(
      std::move(tmpl), "{{BRIEF}}", context.at("brief").get<std::string>());
  rendered = replace_all(std::move(rendered), "{{CONTEXT}}", prior.dump(2));
  if (!diagnostics.empty()) {
    rendered += "\n\nYour previous reply was rejected:\n" + diagnostics +
                "\nReturn a corrected JSON object.";
  }

  json request;
  request["model"] = cfg.model;
  request["temperature"] = cfg.temperature;
  request["response_format"] = {{"type", "json_object"}};
  request["messages"] = json::array(
      {{{"role", "system"},
        {"content",
         "You are one specialist in an architectural planning workflow. "
         "Reply with exactly one JSON object and nothing else."}},
       {{"role", "user"}, {"content", rendered}}});
  return request;
}

}  // namespace

int round_dimensions(double meters, double cell_size_m) {
  return std::max(1, half_up(meters / cell_size_m));
}

const std::vector<std::string>& agent_stage_names() {
  static const std::vector<std::string> names = {
      "basic_info",    "environment",   "outdoor_space",
      "entrance",      "room_analysis", "furniture_analysis"};
  return names;
}

LlmClientConfig config_from_env() {
  LlmClientConfig cfg;
  if (const char* v = std::getenv("GRIDPLAN_LLM_ENDPOINT")) cfg.endpoint = v;
  if (const char* v = std::getenv("GRIDPLAN_LLM_MODEL")) cfg.model = v;
  return cfg;
}

std::unique_ptr<LlmTransport> make_http_transport(const LlmClientConfig& cfg) {
  return std::make_unique<HttpTransport>(cfg);
}

std::unique_ptr<LlmTransport> make_fixture_transport(const std::string& dir) {
  return std::make_unique<FixtureTransport>(dir);
}

SceneGraph run_agents_with(LlmTransport& transport, const std::string& brief,
                           const LlmClientConfig& cfg, AgentReport* report) {
  const std::vector<std::string>& stages = agent_stage_names();
  const int attempt_cap = 1 + std::max(0, cfg.max_retries);

  json context;
  context["brief"] = brief;
  std::map<std::string, json> outputs;
  std::map<std::string, int> attempts;
  std::string carried_diagnostics;
  size_t resume_at = 0;

  for (;;) {
    for (size_t s = resume_at; s < stages.size(); ++s) {
      const std::string& stage = stages[s];
      std::string diagnostics = std::move(carried_diagnostics);
      carried_diagnostics.clear();
      for (;;) {
        if (attempts[stage] >= attempt_cap) {
          throw StageSchemaError(stage + ": " + diagnostics);
        }
        int attempt = ++attempts[stage];
        json request = build_request(cfg, stage, context, diagnostics);
        std::string reply =
            strip_fences(transport.complete(stage, attempt, request));
        json parsed = json::parse(reply, nullptr, false);
        Problems problems;
        if (parsed.is_discarded() || !parsed.is_object()) {
          problems.add("the reply must be a single JSON object");
        } else {
          stage_checkers().at(stage)(parsed, context, problems);
        }
        if (problems.empty()) {
          outputs[stage] = parsed;
          context[stage] = std::move(parsed);
          break;
        }
        diagnostics = problems.joined();
      }
    }

    json doc = assemble_scene(outputs);
    try {
      SceneGraph sg = scene_graph_from_json(doc);
      if (report) {
        report->stages.clear();
        for (const std::string& stage : stages) {
          report->stages.push_back(
              {stage, attempts[stage], outputs.at(stage)});
        }
        report->diagnostics = validate_scene_graph(sg);
      }
      return sg;
    } catch (const Error& e) {
      std::string victim = blame_stage(e.what());
      size_t victim_at = 0;
      while (victim_at < stages.size() && stages[victim_at] != victim) {
        ++victim_at;
      }
      if (attempts[victim] >= attempt_cap) {
        throw ConflictError(
            "scene stayed invalid after retrying " + victim + ": " + e.what());
      }
      for (size_t s = victim_at; s < stages.size(); ++s) {
        context.erase(stages[s]);
        outputs.erase(stages[s]);
      }
      carried_diagnostics = e.what();
      resume_at = victim_at;
    }
  }
}

SceneGraph run_agents(const std::string& brief, const LlmClientConfig& cfg,
                      AgentReport* report) {
  std::unique_ptr<LlmTransport> transport =
      cfg.offline_fixture_dir.empty()
          ? make_http_transport(cfg)
          : make_fixture_transport(cfg.offline_fixture_dir);
  return run_agents_with(*transport, brief, cfg, report);
}

}  // namespace gridplan
