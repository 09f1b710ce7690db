#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "gridplan/common.hpp"
#include "gridplan/ip_builder.hpp"
#include "gridplan/layout.hpp"
#include "gridplan/lp_io.hpp"
#include "gridplan/solver.hpp"
#include "test_support.hpp"

using namespace gridplan;
using testsupport::read_file;
using testsupport::repo_path;

namespace {

MilpModel fixture_model(const std::string& name, Layout* layout_out = nullptr) {
  LayoutFile file =
      parse_layout(read_file(repo_path("tests/fixtures/handcrafted/" + name + ".layout.json")));
  if (layout_out) *layout_out = file.layout;
  Grid grid = make_grid(file.scene.floor);
  return build_model(file.scene, grid, "direct");
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(lp_number(1.0) == "1");
  CHECK(lp_number(-17.0) == "-17");
  CHECK(lp_number(0.5) == "0.5");
  CHECK(lp_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("LP export is stable and survives a round trip") {
  MilpModel model = fixture_model("off_center_furniture");
  std::string text = export_lp(model);

  CHECK(text == export_lp(model));  // repeated export, same bytes
  CHECK(text.rfind("\\ gridplan scene=", 0) == 0);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Binaries") != std::string::npos);

  MilpModel imported = import_lp(text);
  CHECK(imported.variables.size() == model.variables.size());
  CHECK(imported.rows.size() == model.rows.size());
  CHECK(imported.metadata.binary_count == model.metadata.binary_count);
  CHECK(imported.metadata.integer_count == model.metadata.integer_count);
  CHECK(export_lp(imported) == text);

  // Row semantics survive: every assignment feasible for the original model
  // is feasible for the imported one with the same objective value.
  Layout layout;
  MilpModel again = fixture_model("off_center_furniture", &layout);
  std::vector<double> values = layout_to_values(again, layout);
  REQUIRE(complete_solution(again, values));

  std::map<std::string, double> by_name;
  for (size_t v = 0; v < again.variables.size(); ++v) {
    by_name[again.variables[v].name] = values[v];
  }
  std::vector<double> imported_values(imported.variables.size(), 0.0);
  for (size_t v = 0; v < imported.variables.size(); ++v) {
    imported_values[v] = by_name.at(imported.variables[v].name);
  }
  std::string violation;
  CHECK_MESSAGE(satisfies_rows(imported, imported_values, 1e-6, &violation), violation);
  CHECK(imported.eval_objective(imported_values) ==
        doctest::Approx(again.eval_objective(values)).epsilon(1e-9));
}

TEST_CASE("LP import rejects malformed text") {
  CHECK_THROWS_AS(import_lp("Maximize\n obj: x\nSubject To\nEnd\n"), ParseError);
  CHECK_THROWS_AS(import_lp("garbage"), ParseError);
  CHECK_THROWS_AS(import_lp("Minimize\n obj: x\n c0: x 1\nEnd\n"), ParseError);
  CHECK_THROWS_AS(import_lp("Minimize\n obj: x\nSubject To\n c0: x <= y\nEnd\n"),
                  ParseError);
}

TEST_CASE("solution parsing handles both adapter and HiGHS formats") {
  MilpModel model;
  model.add_var("a", VarKind::Binary, 0, 1);
  model.add_var("b", VarKind::Continuous, 0, 10);
  ObjectiveGroup g;
  g.name = "imported";
  g.weight = 2.0;
  g.terms = {{0, 1.0}, {1, 1.0}};
  g.constant = 0.5;
  model.objective.push_back(g);

  SUBCASE("adapter format") {
    Solution sol = parse_solution_text(
        "# comment\n=status= OPTIMAL\n=bound= 4.0\na 0.9999999\nb 1.5\n", model);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.values.at("a") == 1.0);  // snapped to integrality
    CHECK(sol.values.at("b") == 1.5);
    CHECK(sol.objective == doctest::Approx(2.0 * (1.0 + 1.5 + 0.5)));
    CHECK(sol.bound == 4.0);
  }
  SUBCASE("missing variables default to zero") {
    Solution sol = parse_solution_text("=status= FEASIBLE\na 1\n", model);
    CHECK(sol.values.at("b") == 0.0);
    CHECK(sol.objective == doctest::Approx(3.0));
  }
  SUBCASE("infeasible carries no values") {
    Solution sol = parse_solution_text("=status= INFEASIBLE\n", model);
    CHECK(sol.status == SolveStatus::Infeasible);
    CHECK(sol.values.empty());
  }
  SUBCASE("HiGHS native format") {
    std::string text =
        "Model status\nOptimal\n\n# Primal solution values\nFeasible\n"
        "# Columns 2\na 1\nb 2.25\n# Rows 1\nc0 3.25\n";
    Solution sol = parse_solution_text(text, model);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.values.at("b") == 2.25);
    CHECK(sol.objective == doctest::Approx(2.0 * (1.0 + 2.25 + 0.5)));
  }
  SUBCASE("status line is mandatory") {
    CHECK_THROWS_AS(parse_solution_text("a 1\n", model), ParseError);
    CHECK_THROWS_AS(parse_solution_text("=status= SOLVED\na 1\n", model), ParseError);
  }
}

TEST_CASE("external solver solves a furnished fixture to optimality") {
  Layout layout;
  MilpModel model = fixture_model("off_center_furniture", &layout);

  SolveParams params;
  params.time_limit_s = 120;
  Solution sol = solve_external(model, params);
  REQUIRE(sol.status == SolveStatus::Optimal);

  std::vector<double> values(model.variables.size(), 0.0);
  for (size_t v = 0; v < model.variables.size(); ++v) {
    auto it = sol.values.find(model.variables[v].name);
    if (it != sol.values.end()) values[v] = it->second;
  }
  std::string violation;
  CHECK_MESSAGE(satisfies_rows(model, values, 1e-6, &violation), violation);

  // The hand-made layout is feasible, so the optimum cannot be worse.
  std::vector<double> hand = layout_to_values(model, layout);
  REQUIRE(complete_solution(model, hand));
  CHECK(sol.objective <= model.eval_objective(hand) + 1e-6);

  Layout decoded = decode_layout(model, sol.values);
  CHECK(decoded.furniture.size() == layout.furniture.size());
}

TEST_CASE("external solver failure taxonomy") {
  MilpModel model = fixture_model("l_shaped_room");
  SolveParams params;
  SUBCASE("missing command") {
    CHECK_THROWS_AS(
        solve_external(model, params, "/nonexistent/solver --lp {lp} --out {sol}"),
        SolverNotFound);
  }
  SUBCASE("command that dies without writing a solution") {
    CHECK_THROWS_AS(solve_external(model, params, "false"), SolverCrashed);
  }
}

TEST_CASE("external solver reports infeasibility") {
  // Two rooms that both demand the same corner cannot coexist.
  json doc = testsupport::base_scene(3, 3);
  json r1 = testsupport::room_doc(1, "a", 3);
  json r2 = testsupport::room_doc(2, "b", 3);
  r1["corner_pref"] = "NE";
  r2["corner_pref"] = "NE";
  doc["rooms"].push_back(r1);
  doc["rooms"].push_back(r2);
  SceneGraph sg = scene_graph_from_json(doc);
  Grid grid = make_grid(sg.floor);
  MilpModel model = build_model(sg, grid, "direct");
  SolveParams params;
  Solution sol = solve_external(model, params);
  CHECK(sol.status == SolveStatus::Infeasible);
}
