#include "gridplan/coarse_to_fine.hpp"

#include <algorithm>
#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "gridplan/common.hpp"

namespace gridplan {

Cell map_fine_to_coarse(Cell fine, int s_i, int s_j) {
  return Cell{fine.i / s_i, fine.j / s_j};
}

SceneGraph downsample_scene(const SceneGraph& sg, int s_i, int s_j) {
  if (s_i < 1 || s_j < 1) {
    throw DegenerateGrid("downsample factors must be at least 1, got " +
                         std::to_string(s_i) + "x" + std::to_string(s_j));
  }
  const int W = sg.floor.width_cells;
  const int L = sg.floor.length_cells;
  const int CW = (W + s_i - 1) / s_i;
  const int CL = (L + s_j - 1) / s_j;
  Grid fine_grid = make_grid(sg.floor);

  // Majority vote per block, ties indoor.
  std::vector<int> indoor(static_cast<size_t>(CW) * CL, 0);
  std::vector<int> total(static_cast<size_t>(CW) * CL, 0);
  for (int j = 0; j < L; ++j) {
    for (int i = 0; i < W; ++i) {
      Cell cc = map_fine_to_coarse(Cell{i, j}, s_i, s_j);
      size_t at = static_cast<size_t>(cc.j) * CW + cc.i;
      total[at] += 1;
      if (fine_grid.indoor(Cell{i, j})) indoor[at] += 1;
    }
  }

  SceneGraph out;
  out.floor.width_cells = CW;
  out.floor.length_cells = CL;
  out.floor.cell_size_m = sg.floor.cell_size_m * s_i;
  out.floor.entrance = map_fine_to_coarse(sg.floor.entrance, s_i, s_j);

  int indoor_count = 0;
  for (int cj = 0; cj < CL; ++cj) {
    for (int ci = 0; ci < CW; ++ci) {
      size_t at = static_cast<size_t>(cj) * CW + ci;
      bool keep = 2 * indoor[at] >= total[at];
      if (Cell{ci, cj} == out.floor.entrance) keep = true;
      if (keep) {
        ++indoor_count;
      } else {
        out.floor.outdoor_cells.push_back(Cell{ci, cj});
      }
    }
  }
  if (indoor_count < static_cast<int>(sg.rooms.size())) {
    throw DegenerateGrid("coarse grid keeps " + std::to_string(indoor_count) +
                         " indoor cells for " + std::to_string(sg.rooms.size()) +
                         " rooms; lower the downsample factors");
  }

  const int block = s_i * s_j;
  for (const RoomSpec& room : sg.rooms) {
    RoomSpec scaled;
    scaled.id = room.id;
    scaled.name = room.name;
    scaled.open = room.open;
    scaled.corner_pref = room.corner_pref;
    // Round half up, and never ask for an empty room.
    scaled.target_area_cells =
        std::max(1, (2 * room.target_area_cells + block) / (2 * block));
    out.rooms.push_back(std::move(scaled));
  }

  // Room-level constraints survive; furniture-level ones reference objects
  // that no longer exist.
  out.constraints.adjacency_pairs = sg.constraints.adjacency_pairs;
  out.constraints.privacy_order = sg.constraints.privacy_order;
  out.weights = sg.weights;
  out.metadata = json{{"downsampled_from", {W, L}}, {"factors", {s_i, s_j}}};
  return out;
}

std::shared_ptr<CoarseHint> make_hint(const SceneGraph& fine_sg,
                                      const SceneGraph& coarse_sg,
                                      const Layout& coarse_layout, int s_i,
                                      int s_j) {
  auto hint = std::make_shared<CoarseHint>();
  hint->s_i = s_i;
  hint->s_j = s_j;
  hint->coarse_width = coarse_layout.width;
  hint->coarse_length = coarse_layout.length;
  hint->coarse_labels = coarse_layout.labels;

  if (coarse_layout.width != coarse_sg.floor.width_cells ||
      coarse_layout.length != coarse_sg.floor.length_cells) {
    throw BuildError("coarse layout extents do not match the coarse scene");
  }

  const int W = fine_sg.floor.width_cells;
  const int L = fine_sg.floor.length_cells;
  Grid fine_grid = make_grid(fine_sg.floor);
  hint->pi.assign(static_cast<size_t>(W) * L, -1);
  for (int j = 0; j < L; ++j) {
    for (int i = 0; i < W; ++i) {
      Cell cc = map_fine_to_coarse(Cell{i, j}, s_i, s_j);
      if (cc.i >= coarse_layout.width || cc.j >= coarse_layout.length) continue;
      if (coarse_layout.label(cc) == Layout::kOutside) continue;
      hint->pi[static_cast<size_t>(j) * W + i] = cc.j * coarse_layout.width + cc.i;

      if (!fine_grid.indoor(Cell{i, j})) continue;
      int lab = coarse_layout.label(cc);
      std::string suffix = "_" + std::to_string(i) + "_" + std::to_string(j);
      if (lab == Layout::kCorridor) {
        hint->warm_start["p" + suffix] = 1.0;
      } else if (fine_sg.room_by_id(lab)) {
        hint->warm_start["x_" + std::to_string(lab) + suffix] = 1.0;
      }
    }
  }
  return hint;
}

namespace {

Solution run_backend(const MilpModel& model, const SolveOptions& options) {
  if (options.backend == "external") {
    return solve_external(model, options.params, options.solver_command);
  }
  if (options.backend == "builtin") {
    return solve_builtin(model, options.params);
  }
  throw BuildError("unknown solver backend '" + options.backend +
                   "'; expected \"builtin\" or \"external\"");
}

PhaseReport phase_report(const std::string& name, const MilpModel& model,
                         const Solution& sol) {
  PhaseReport pr;
  pr.name = name;
  pr.status = to_string(sol.status);
  pr.objective = sol.objective;
  pr.bound = sol.bound;
  pr.wall_time_s = sol.wall_time_s;
  pr.nodes = sol.nodes;
  pr.binaries = model.metadata.binary_count;
  pr.rows = static_cast<int>(model.rows.size());
  return pr;
}

void finish(SolveReport& report, const MilpModel& model, const Solution& sol) {
  report.status = sol.status;
  report.has_layout = sol.status != SolveStatus::Infeasible && !sol.values.empty();
  if (report.has_layout) {
    report.layout = decode_layout(model, sol.values);
  }
}

}  // namespace

SolveReport solve_scene(const SceneGraph& sg, const SolveOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  SolveReport report;
  Grid grid = make_grid(sg.floor);

  bool want_coarse = options.coarse_to_fine;
  if (want_coarse) {
    try {
      SceneGraph coarse_sg = downsample_scene(sg, options.s_i, options.s_j);
      Grid coarse_grid = make_grid(coarse_sg.floor);
      MilpModel coarse_model = build_model(coarse_sg, coarse_grid, "coarse");
      Solution coarse_sol = run_backend(coarse_model, options);
      report.phases.push_back(phase_report("coarse", coarse_model, coarse_sol));

      if (coarse_sol.status == SolveStatus::Infeasible || coarse_sol.values.empty()) {
        report.used_fallback = true;
        report.fallback_reason = coarse_sol.status == SolveStatus::Infeasible
                                     ? "coarse model is infeasible"
                                     : "coarse solve produced no incumbent";
      } else {
        Layout coarse_layout = decode_layout(coarse_model, coarse_sol.values);
        report.hint = make_hint(sg, coarse_sg, coarse_layout, options.s_i, options.s_j);
        MilpModel fine_model = build_model(sg, grid, "fine", report.hint);
        Solution fine_sol = run_backend(fine_model, options);
        report.phases.push_back(phase_report("fine", fine_model, fine_sol));
        finish(report, fine_model, fine_sol);
        report.total_wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return report;
      }
    } catch (const DegenerateGrid& err) {
      report.used_fallback = true;
      report.fallback_reason = err.what();
    } catch (const BuildError& err) {
      report.used_fallback = true;
      report.fallback_reason = err.what();
    }
  }

  MilpModel direct_model = build_model(sg, grid, "direct");
  Solution direct_sol = run_backend(direct_model, options);
  report.phases.push_back(phase_report("direct", direct_model, direct_sol));
  finish(report, direct_model, direct_sol);
  report.total_wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace gridplan
