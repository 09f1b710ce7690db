#include "gridplan/ip_builder.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <sstream>

#include "builder_detail.hpp"
#include "gridplan/coarse_to_fine.hpp"
#include "gridplan/common.hpp"

namespace gridplan {

using detail::BoxInfo;
using detail::RoomGeometry;
using detail::case_of;
using detail::item_index_by_id;
using detail::len_i_of;
using detail::len_j_of;
using detail::nu_of;
using detail::room_index_by_id;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string cell_suffix(Cell c) {
  return "_" + std::to_string(c.i) + "_" + std::to_string(c.j);
}

// Accumulates coefficients so repeated adds to the same variable merge.
class RowAcc {
 public:
  void add(int var, double coef) {
    if (coef == 0.0) return;
    coefs_[var] += coef;
  }
  std::vector<LinTerm> terms() const {
    std::vector<LinTerm> out;
    out.reserve(coefs_.size());
    for (const auto& [var, coef] : coefs_) {
      if (coef != 0.0) out.push_back(LinTerm{var, coef});
    }
    return out;
  }

 private:
  std::map<int, double> coefs_;
};

const BuildContext& require_context(const MilpModel& model, const char* op) {
  if (!model.context) {
    throw InvalidModel(std::string(op) +
                       " requires a model produced by declare_variables");
  }
  return *model.context;
}

// Traversable-cell indicator q(c) = p + sum over open rooms of (x - sum_l f),
// added into a row with the given sign.
void add_q_terms(const BuildContext& ctx, RowAcc& acc, int cell, double sign) {
  acc.add(ctx.p[cell], sign);
  for (int rk = 0; rk < ctx.room_count(); ++rk) {
    if (!ctx.sg.rooms[rk].open) continue;
    acc.add(ctx.x[rk][cell], sign);
    for (int l = 0; l < ctx.item_count(rk); ++l) {
      acc.add(ctx.f[rk][l][cell], -sign);
    }
  }
}

}  // namespace

int MilpModel::add_var(const std::string& name, VarKind kind, double lo, double hi) {
  auto [it, inserted] = var_index.emplace(name, static_cast<int>(variables.size()));
  if (!inserted) {
    throw InvalidModel("duplicate variable name " + name);
  }
  variables.push_back(VarDef{name, kind, lo, hi});
  return it->second;
}

Row& MilpModel::add_row(const std::string& name, RowSense sense, double rhs) {
  rows.push_back(Row{name, {}, sense, rhs});
  return rows.back();
}

ObjectiveGroup& MilpModel::group(const std::string& name, double weight) {
  for (auto& g : objective) {
    if (g.name == name) return g;
  }
  objective.push_back(ObjectiveGroup{name, weight, {}, 0.0});
  return objective.back();
}

int MilpModel::var(const std::string& name) const {
  auto it = var_index.find(name);
  return it == var_index.end() ? -1 : it->second;
}

void MilpModel::refresh_metadata_counts() {
  metadata.binary_count = 0;
  metadata.integer_count = 0;
  metadata.continuous_count = 0;
  for (const auto& v : variables) {
    switch (v.kind) {
      case VarKind::Binary: ++metadata.binary_count; break;
      case VarKind::Integer: ++metadata.integer_count; break;
      case VarKind::Continuous: ++metadata.continuous_count; break;
    }
  }
}

double MilpModel::eval_objective(const std::vector<double>& values) const {
  double total = 0.0;
  for (const auto& g : objective) {
    double raw = g.constant;
    for (const auto& t : g.terms) raw += t.coef * values[t.var];
    total += g.weight * raw;
  }
  return total;
}

std::map<std::string, double> MilpModel::eval_groups(
    const std::vector<double>& values) const {
  std::map<std::string, double> out;
  for (const auto& g : objective) {
    double raw = g.constant;
    for (const auto& t : g.terms) raw += t.coef * values[t.var];
    out[g.name] = raw;
  }
  return out;
}

double MilpModel::objective_constant() const {
  double c = 0.0;
  for (const auto& g : objective) c += g.weight * g.constant;
  return c;
}

MilpModel declare_variables(const SceneGraph& sg, const Grid& grid, bool coarse,
                            std::shared_ptr<const CoarseHint> hint) {
  MilpModel model;
  auto ctx = std::make_shared<BuildContext>(sg, grid);
  ctx->coarse = coarse;
  ctx->hint = std::move(hint);

  const int W = grid.width();
  const int L = grid.length();
  ctx->compact.assign(static_cast<size_t>(W) * L, -1);
  for (Cell c : grid.indoor_cells()) {
    ctx->compact[static_cast<size_t>(c.j) * W + c.i] =
        static_cast<int>(ctx->cells.size());
    ctx->cells.push_back(c);
  }
  const int n_cells = static_cast<int>(ctx->cells.size());
  model.big_M = n_cells + 1;

  const int n_rooms = static_cast<int>(sg.rooms.size());

  // Room assignment and corridor binaries.
  ctx->x.assign(n_rooms, std::vector<int>(n_cells, -1));
  for (int rk = 0; rk < n_rooms; ++rk) {
    const std::string base = "x_" + std::to_string(sg.rooms[rk].id);
    for (int c = 0; c < n_cells; ++c) {
      ctx->x[rk][c] =
          model.add_var(base + cell_suffix(ctx->cells[c]), VarKind::Binary, 0, 1);
    }
  }
  ctx->p.assign(n_cells, -1);
  for (int c = 0; c < n_cells; ++c) {
    ctx->p[c] = model.add_var("p" + cell_suffix(ctx->cells[c]), VarKind::Binary, 0, 1);
  }

  // Furniture placement and orientation (skipped in the coarse phase).
  ctx->f.assign(n_rooms, {});
  ctx->sigma.assign(n_rooms, {});
  ctx->mu.assign(n_rooms, {});
  ctx->cases.assign(n_rooms, {});
  if (!coarse) {
    // Orientation case binaries exist only where a constraint consumes the
    // facing direction.
    std::vector<std::vector<bool>> needs_cases(n_rooms);
    for (int rk = 0; rk < n_rooms; ++rk) {
      needs_cases[rk].assign(sg.rooms[rk].furniture.size(), false);
      for (size_t l = 0; l < sg.rooms[rk].furniture.size(); ++l) {
        if (sg.rooms[rk].furniture[l].against_wall) needs_cases[rk][l] = true;
      }
    }
    for (const auto& pair : sg.constraints.facing_pairs) {
      int rk = room_index_by_id(sg, pair.room);
      int l1 = item_index_by_id(sg.rooms[rk], pair.l1);
      needs_cases[rk][l1] = true;
    }

    for (int rk = 0; rk < n_rooms; ++rk) {
      const auto& room = sg.rooms[rk];
      const std::string rid = std::to_string(room.id);
      int n_items = static_cast<int>(room.furniture.size());
      ctx->f[rk].assign(n_items, std::vector<int>(n_cells, -1));
      ctx->sigma[rk].assign(n_items, -1);
      ctx->mu[rk].assign(n_items, -1);
      ctx->cases[rk].assign(n_items, {-1, -1, -1, -1});
      for (int l = 0; l < n_items; ++l) {
        const std::string base = "f_" + rid + "_" + std::to_string(room.furniture[l].id);
        for (int c = 0; c < n_cells; ++c) {
          ctx->f[rk][l][c] =
              model.add_var(base + cell_suffix(ctx->cells[c]), VarKind::Binary, 0, 1);
        }
        const std::string oid = rid + "_" + std::to_string(room.furniture[l].id);
        ctx->sigma[rk][l] = model.add_var("sig_" + oid, VarKind::Binary, 0, 1);
        ctx->mu[rk][l] = model.add_var("mu_" + oid, VarKind::Binary, 0, 1);
        if (needs_cases[rk][l]) {
          for (int d = 0; d < 4; ++d) {
            ctx->cases[rk][l][d] = model.add_var(
                "oc_" + oid + "_" + std::string(1, direction_letter(kDirections[d])),
                VarKind::Binary, 0, 1);
          }
        }
      }
    }
  }

  // Corridor flow, one variable per cell and direction (void directions
  // included; they are how supply leaves the network).
  ctx->flow.assign(n_cells, {-1, -1, -1, -1});
  for (int c = 0; c < n_cells; ++c) {
    for (int d = 0; d < 4; ++d) {
      ctx->flow[c][d] = model.add_var(
          "fl" + cell_suffix(ctx->cells[c]) + "_" +
              std::string(1, direction_letter(kDirections[d])),
          VarKind::Continuous, 0, model.big_M);
    }
  }

  // Witness binaries: accessibility (closed rooms), adjacency, against-wall.
  for (int rk = 0; rk < n_rooms; ++rk) {
    if (sg.rooms[rk].open) continue;
    const std::string base = "al_" + std::to_string(sg.rooms[rk].id);
    for (int c = 0; c < n_cells; ++c) {
      model.add_var(base + cell_suffix(ctx->cells[c]), VarKind::Binary, 0, 1);
    }
  }
  for (const auto& pair : sg.constraints.adjacency_pairs) {
    const std::string base =
        "bt_" + std::to_string(pair.k) + "_" + std::to_string(pair.m);
    for (int c = 0; c < n_cells; ++c) {
      model.add_var(base + cell_suffix(ctx->cells[c]), VarKind::Binary, 0, 1);
    }
  }
  if (!coarse) {
    for (int rk = 0; rk < n_rooms; ++rk) {
      const auto& room = sg.rooms[rk];
      for (size_t l = 0; l < room.furniture.size(); ++l) {
        if (!room.furniture[l].against_wall) continue;
        const std::string base = "ph_" + std::to_string(room.id) + "_" +
                                 std::to_string(room.furniture[l].id);
        for (int c = 0; c < n_cells; ++c) {
          model.add_var(base + cell_suffix(ctx->cells[c]), VarKind::Binary, 0, 1);
        }
      }
    }
  }

  // Room bounding boxes.
  ctx->gamma_min_i.assign(n_rooms, -1);
  ctx->gamma_min_j.assign(n_rooms, -1);
  ctx->gamma_len_i.assign(n_rooms, -1);
  ctx->gamma_len_j.assign(n_rooms, -1);
  for (int rk = 0; rk < n_rooms; ++rk) {
    const std::string rid = std::to_string(sg.rooms[rk].id);
    ctx->gamma_min_i[rk] = model.add_var("gmi_" + rid, VarKind::Integer, 0, W - 1);
    ctx->gamma_min_j[rk] = model.add_var("gmj_" + rid, VarKind::Integer, 0, L - 1);
    ctx->gamma_len_i[rk] = model.add_var("gli_" + rid, VarKind::Integer, 1, W);
    ctx->gamma_len_j[rk] = model.add_var("glj_" + rid, VarKind::Integer, 1, L);
  }

  // Furniture bounding-box corners.
  ctx->xi_min_i.assign(n_rooms, {});
  ctx->xi_min_j.assign(n_rooms, {});
  if (!coarse) {
    for (int rk = 0; rk < n_rooms; ++rk) {
      const auto& room = sg.rooms[rk];
      int n_items = static_cast<int>(room.furniture.size());
      ctx->xi_min_i[rk].assign(n_items, -1);
      ctx->xi_min_j[rk].assign(n_items, -1);
      for (int l = 0; l < n_items; ++l) {
        const std::string oid =
            std::to_string(room.id) + "_" + std::to_string(room.furniture[l].id);
        ctx->xi_min_i[rk][l] = model.add_var("xmi_" + oid, VarKind::Integer, 0, W - 1);
        ctx->xi_min_j[rk][l] = model.add_var("xmj_" + oid, VarKind::Integer, 0, L - 1);
      }
    }
  }

  model.metadata.scene_digest = scene_digest(sg);
  model.metadata.phase = coarse ? "coarse" : "direct";
  model.metadata.width = W;
  model.metadata.length = L;
  model.metadata.indoor_cells = n_cells;

  model.context = std::move(ctx);
  model.refresh_metadata_counts();
  return model;
}

void encode_non_overlap(MilpModel& model) {
  const auto& ctx = require_context(model, "encode_non_overlap");
  model.encoded.insert("non_overlap");
  for (size_t c = 0; c < ctx.cells.size(); ++c) {
    RowAcc acc;
    acc.add(ctx.p[c], 1.0);
    for (int rk = 0; rk < ctx.room_count(); ++rk) acc.add(ctx.x[rk][c], 1.0);
    Row& row = model.add_row("no" + cell_suffix(ctx.cells[c]), RowSense::EQ, 1.0);
    row.terms = acc.terms();
  }
}

void encode_connectivity(MilpModel& model) {
  const auto& ctx = require_context(model, "encode_connectivity");
  model.encoded.insert("connectivity");
  const Grid& grid = ctx.grid;
  const double M = model.big_M;

  for (size_t c = 0; c < ctx.cells.size(); ++c) {
    Cell cell = ctx.cells[c];
    for (int d = 0; d < 4; ++d) {
      // Flow may leave a cell only if the cell is traversable.
      {
        RowAcc acc;
        acc.add(ctx.flow[c][d], 1.0);
        add_q_terms(ctx, acc, static_cast<int>(c), -M);
        Row& row = model.add_row(
            "cs" + cell_suffix(cell) + "_" +
                std::string(1, direction_letter(kDirections[d])),
            RowSense::LE, 0.0);
        row.terms = acc.terms();
      }
      // ... and enter a cell only if the target is traversable. Flow into a
      // void direction has no target row: that is the network's sink.
      auto target = grid.adj(cell, kDirections[d]);
      if (target.has_value()) {
        int t = ctx.cell_index(*target);
        RowAcc acc;
        acc.add(ctx.flow[c][d], 1.0);
        add_q_terms(ctx, acc, t, -M);
        Row& row = model.add_row(
            "ct" + cell_suffix(cell) + "_" +
                std::string(1, direction_letter(kDirections[d])),
            RowSense::LE, 0.0);
        row.terms = acc.terms();
      }
    }
  }

  // Conservation: the entrance supplies one unit per traversable cell, every
  // other cell retains q units.
  const int e = ctx.cell_index(grid.entrance());
  for (size_t c = 0; c < ctx.cells.size(); ++c) {
    Cell cell = ctx.cells[c];
    RowAcc acc;
    for (int d = 0; d < 4; ++d) acc.add(ctx.flow[c][d], 1.0);
    for (int d = 0; d < 4; ++d) {
      auto n = grid.adj(cell, inverse(kDirections[d]));
      if (n.has_value()) acc.add(ctx.flow[ctx.cell_index(*n)][d], -1.0);
    }
    if (static_cast<int>(c) == e) {
      for (size_t c2 = 0; c2 < ctx.cells.size(); ++c2) {
        add_q_terms(ctx, acc, static_cast<int>(c2), -1.0);
      }
    } else {
      add_q_terms(ctx, acc, static_cast<int>(c), 1.0);
    }
    Row& row = model.add_row("cb" + cell_suffix(cell), RowSense::EQ, 0.0);
    row.terms = acc.terms();
  }
}

void encode_accessibility(MilpModel& model) {
  const auto& ctx = require_context(model, "encode_accessibility");
  model.encoded.insert("accessibility");
  const Grid& grid = ctx.grid;
  for (int rk = 0; rk < ctx.room_count(); ++rk) {
    const auto& room = ctx.sg.rooms[rk];
    if (room.open) continue;
    const std::string base = "al_" + std::to_string(room.id);
    RowAcc total;
    for (size_t c = 0; c < ctx.cells.size(); ++c) {
      Cell cell = ctx.cells[c];
      int al = model.var(base + cell_suffix(cell));
      total.add(al, 1.0);
      // The witness cell must border a traversable cell...
      {
        RowAcc acc;
        for (Cell n : grid.neighbors(cell)) {
          if (!grid.indoor(n)) continue;
          add_q_terms(ctx, acc, ctx.cell_index(n), 1.0);
        }
        acc.add(al, -1.0);
        Row& row = model.add_row("acq_" + std::to_string(room.id) + cell_suffix(cell),
                                 RowSense::GE, 0.0);
        row.terms = acc.terms();
      }
      // ... and belong to the room without being covered by furniture.
      {
        RowAcc acc;
        acc.add(al, 1.0);
        acc.add(ctx.x[rk][c], -1.0);
        for (int l = 0; l < ctx.item_count(rk); ++l) acc.add(ctx.f[rk][l][c], 1.0);
        Row& row = model.add_row("acx_" + std::to_string(room.id) + cell_suffix(cell),
                                 RowSense::LE, 0.0);
        row.terms = acc.terms();
      }
    }
    Row& row = model.add_row("ac_" + std::to_string(room.id), RowSense::GE, 1.0);
    row.terms = total.terms();
  }
}

void encode_adjacency(MilpModel& model) {
  const auto& ctx = require_context(model, "encode_adjacency");
  model.encoded.insert("adjacency");
  const Grid& grid = ctx.grid;
  for (const auto& pair : ctx.sg.constraints.adjacency_pairs) {
    int rk = room_index_by_id(ctx.sg, pair.k);
    int rm = room_index_by_id(ctx.sg, pair.m);
    const std::string base =
        "bt_" + std::to_string(pair.k) + "_" + std::to_string(pair.m);
    RowAcc total;
    for (size_t c = 0; c < ctx.cells.size(); ++c) {
      Cell cell = ctx.cells[c];
      int bt = model.var(base + cell_suffix(cell));
      total.add(bt, 1.0);
      {
        RowAcc acc;
        for (Cell n : grid.neighbors(cell)) {
          if (!grid.indoor(n)) continue;
          acc.add(ctx.x[rm][ctx.cell_index(n)], 1.0);
        }
        acc.add(bt, -1.0);
        Row& row = model.add_row("ajn_" + base.substr(3) + cell_suffix(cell),
                                 RowSense::GE, 0.0);
        row.terms = acc.terms();
      }
      {
        RowAcc acc;
        acc.add(bt, 1.0);
        acc.add(ctx.x[rk][c], -1.0);
        Row& row = model.add_row("ajx_" + base.substr(3) + cell_suffix(cell),
                                 RowSense::LE, 0.0);
        row.terms = acc.terms();
      }
    }
    Row& row = model.add_row("aj_" + base.substr(3), RowSense::GE, 1.0);
    row.terms = total.terms();
  }
}

void encode_room_bbox(MilpModel& model) {
  const auto& ctx = require_context(model, "encode_room_bbox");
  model.encoded.insert("room_bbox");
  const int W = ctx.grid.width();
  const int L = ctx.grid.length();
  for (int rk = 0; rk < ctx.room_count(); ++rk) {
    const std::string rid = std::to_string(ctx.sg.rooms[rk].id);
    int gmi = ctx.gamma_min_i[rk], gmj = ctx.gamma_min_j[rk];
    int gli = ctx.gamma_len_i[rk], glj = ctx.gamma_len_j[rk];
    // Activation constants are per cell: exactly the slack the inactive case
    // needs given the variable domains. Zero slack means the row is implied
    // by the domains and can be dropped.
    for (size_t c = 0; c < ctx.cells.size(); ++c) {
      Cell cell = ctx.cells[c];
      int xv = ctx.x[rk][c];
      if (double M = W - 1 - cell.i; M > 0) {
        Row& row = model.add_row("rbl_i_" + rid + cell_suffix(cell), RowSense::LE,
                                 cell.i + M);
        row.terms = {{gmi, 1.0}, {xv, M}};
      }
      if (double M = cell.i; M > 0) {
        Row& row = model.add_row("rbu_i_" + rid + cell_suffix(cell), RowSense::GE,
                                 cell.i + 1 - M);
        row.terms = {{gmi, 1.0}, {gli, 1.0}, {xv, -M}};
      }
      if (double M = L - 1 - cell.j; M > 0) {
        Row& row = model.add_row("rbl_j_" + rid + cell_suffix(cell), RowSense::LE,
                                 cell.j + M);
        row.terms = {{gmj, 1.0}, {xv, M}};
      }
      if (double M = cell.j; M > 0) {
        Row& row = model.add_row("rbu_j_" + rid + cell_suffix(cell), RowSense::GE,
                                 cell.j + 1 - M);
        row.terms = {{gmj, 1.0}, {glj, 1.0}, {xv, -M}};
      }
    }
    {
      Row& row = model.add_row("rbd_i_" + rid, RowSense::LE, W);
      row.terms = {{gmi, 1.0}, {gli, 1.0}};
    }
    {
      Row& row = model.add_row("rbd_j_" + rid, RowSense::LE, L);
      row.terms = {{gmj, 1.0}, {glj, 1.0}};
    }
  }
}

void encode_corner(MilpModel& model) {
  const auto& ctx = require_context(model, "encode_corner");
  model.encoded.insert("corner");
  for (int rk = 0; rk < ctx.room_count(); ++rk) {
    const auto& room = ctx.sg.rooms[rk];
    if (!room.corner_pref.has_value()) continue;
    Cell corner = corner_cell(*room.corner_pref, ctx.grid.width(), ctx.grid.length());
    if (!ctx.grid.indoor(corner)) {
      throw CornerOutdoor("room " + std::to_string(room.id) + " prefers corner " +
                          corner_name(*room.corner_pref) + " at (" +
                          std::to_string(corner.i) + "," + std::to_string(corner.j) +
                          ") which is not indoor");
    }
    Row& row = model.add_row("cr_" + std::to_string(room.id), RowSense::EQ, 1.0);
    row.terms = {{ctx.x[rk][ctx.cell_index(corner)], 1.0}};
  }
}

void encode_furniture(MilpModel& model) {
  const auto& ctx = require_context(model, "encode_furniture");
  if (ctx.coarse) return;
  model.encoded.insert("furniture");
  const double M = model.big_M;
  const int W = ctx.grid.width();
  const int L = ctx.grid.length();

  for (int rk = 0; rk < ctx.room_count(); ++rk) {
    const auto& room = ctx.sg.rooms[rk];
    const int n_items = static_cast<int>(room.furniture.size());
    const std::string rid = std::to_string(room.id);

    // At most one object of the room per cell.
    if (n_items >= 2) {
      for (size_t c = 0; c < ctx.cells.size(); ++c) {
        RowAcc acc;
        for (int l = 0; l < n_items; ++l) acc.add(ctx.f[rk][l][c], 1.0);
        Row& row =
            model.add_row("fo_" + rid + cell_suffix(ctx.cells[c]), RowSense::LE, 1.0);
        row.terms = acc.terms();
      }
    }

    for (int l = 0; l < n_items; ++l) {
      const auto& item = room.furniture[l];
      const std::string oid = rid + "_" + std::to_string(item.id);
      const int Wl = item.width_cells, Ll = item.length_cells;
      int sig = ctx.sigma[rk][l];
      int xmi = ctx.xi_min_i[rk][l], xmj = ctx.xi_min_j[rk][l];

      // Containment in the owning room.
      for (size_t c = 0; c < ctx.cells.size(); ++c) {
        Row& row =
            model.add_row("fc_" + oid + cell_suffix(ctx.cells[c]), RowSense::LE, 0.0);
        row.terms = {{ctx.f[rk][l][c], 1.0}, {ctx.x[rk][c], -1.0}};
      }

      // Fixed footprint area; with the bounding-box rows below this pins the
      // occupied cells to an exact len_i x len_j rectangle.
      {
        RowAcc acc;
        for (size_t c = 0; c < ctx.cells.size(); ++c) acc.add(ctx.f[rk][l][c], 1.0);
        Row& row = model.add_row("fs_" + oid, RowSense::EQ,
                                 static_cast<double>(Wl) * Ll);
        row.terms = acc.terms();
      }

      // Per-cell activation constants, like the room box rows: the inactive
      // case must tolerate any corner position and either rotation.
      const int short_side = std::min(Wl, Ll);
      for (size_t c = 0; c < ctx.cells.size(); ++c) {
        Cell cell = ctx.cells[c];
        int fv = ctx.f[rk][l][c];
        if (double Mc = W - 1 - cell.i; Mc > 0) {
          Row& row = model.add_row("fbl_i_" + oid + cell_suffix(cell), RowSense::LE,
                                   cell.i + Mc);
          row.terms = {{xmi, 1.0}, {fv, Mc}};
        }
        if (double Mc = cell.i + 1 - short_side; Mc > 0) {
          Row& row = model.add_row("fbu_i_" + oid + cell_suffix(cell), RowSense::GE,
                                   cell.i + 1 - Wl - Mc);
          RowAcc acc;
          acc.add(xmi, 1.0);
          acc.add(sig, Ll - Wl);
          acc.add(fv, -Mc);
          row.terms = acc.terms();
        }
        if (double Mc = L - 1 - cell.j; Mc > 0) {
          Row& row = model.add_row("fbl_j_" + oid + cell_suffix(cell), RowSense::LE,
                                   cell.j + Mc);
          row.terms = {{xmj, 1.0}, {fv, Mc}};
        }
        if (double Mc = cell.j + 1 - short_side; Mc > 0) {
          Row& row = model.add_row("fbu_j_" + oid + cell_suffix(cell), RowSense::GE,
                                   cell.j + 1 - Ll - Mc);
          RowAcc acc;
          acc.add(xmj, 1.0);
          acc.add(sig, Wl - Ll);
          acc.add(fv, -Mc);
          row.terms = acc.terms();
        }
      }

      // The rotated box stays inside the grid.
      {
        Row& row = model.add_row("fd_i_" + oid, RowSense::LE, W - Wl);
        RowAcc acc;
        acc.add(xmi, 1.0);
        acc.add(sig, Ll - Wl);
        row.terms = acc.terms();
      }
      {
        Row& row = model.add_row("fd_j_" + oid, RowSense::LE, L - Ll);
        RowAcc acc;
        acc.add(xmj, 1.0);
        acc.add(sig, Wl - Ll);
        row.terms = acc.terms();
      }

      // Orientation case binaries, when some constraint consumes the facing
      // direction: exactly one case, tied to (sigma, mu).
      if (ctx.cases[rk][l][0] >= 0) {
        const auto& cs = ctx.cases[rk][l];
        {
          Row& row = model.add_row("ocs_" + oid, RowSense::EQ, 1.0);
          row.terms = {{cs[0], 1.0}, {cs[1], 1.0}, {cs[2], 1.0}, {cs[3], 1.0}};
        }
        {
          Row& row = model.add_row("ocx_" + oid, RowSense::EQ, 0.0);
          row.terms = {{cs[0], 1.0}, {cs[1], 1.0}, {sig, -1.0}};
        }
        {
          Row& row = model.add_row("ocy_" + oid, RowSense::EQ, 0.0);
          row.terms = {{cs[1], 1.0}, {cs[2], 1.0}, {ctx.mu[rk][l], -1.0}};
        }
      }
    }
  }
}

void encode_against_wall(MilpModel& model) {
  const auto& ctx = require_context(model, "encode_against_wall");
  if (ctx.coarse) return;
  model.encoded.insert("against_wall");
  const Grid& grid = ctx.grid;

  for (int rk = 0; rk < ctx.room_count(); ++rk) {
    const auto& room = ctx.sg.rooms[rk];
    for (size_t l = 0; l < room.furniture.size(); ++l) {
      const auto& item = room.furniture[l];
      if (!item.against_wall) continue;
      const std::string oid =
          std::to_string(room.id) + "_" + std::to_string(item.id);
      const std::string base = "ph_" + oid;

      RowAcc total;
      for (size_t c = 0; c < ctx.cells.size(); ++c) {
        Cell cell = ctx.cells[c];
        int ph = model.var(base + cell_suffix(cell));
        total.add(ph, 1.0);
        // Witness cells must be occupied by the object...
        {
          Row& row =
              model.add_row("awf_" + oid + cell_suffix(cell), RowSense::LE, 0.0);
          row.terms = {{ph, 1.0}, {ctx.f[rk][static_cast<int>(l)][c], -1.0}};
        }
        // ... and have a neighbor outside the room (void cells count).
        {
          RowAcc acc;
          acc.add(ph, 1.0);
          for (Cell n : grid.neighbors(cell)) {
            if (grid.indoor(n)) acc.add(ctx.x[rk][ctx.cell_index(n)], 1.0);
          }
          Row& row =
              model.add_row("aww_" + oid + cell_suffix(cell), RowSense::LE, 4.0);
          row.terms = acc.terms();
        }
      }
      Row& row = model.add_row("aw_" + oid, RowSense::GE, 1.0);
      row.terms = total.terms();

      // Every occupied cell must face into the room: for each orientation
      // case, the cell one step toward nu must carry the room label.
      const auto& cs = ctx.cases[rk][l];
      for (size_t c = 0; c < ctx.cells.size(); ++c) {
        Cell cell = ctx.cells[c];
        for (int d = 0; d < 4; ++d) {
          auto front = grid.adj(cell, kDirections[d]);
          RowAcc acc;
          acc.add(ctx.f[rk][static_cast<int>(l)][c], 1.0);
          acc.add(cs[d], 1.0);
          if (front.has_value()) acc.add(ctx.x[rk][ctx.cell_index(*front)], -1.0);
          Row& row = model.add_row(
              "ao_" + oid + cell_suffix(cell) + "_" +
                  std::string(1, direction_letter(kDirections[d])),
              RowSense::LE, 1.0);
          row.terms = acc.terms();
        }
      }
    }
  }
}

void encode_alignment_facing(MilpModel& model) {
  const auto& ctx = require_context(model, "encode_alignment_facing");
  if (ctx.coarse) return;
  model.encoded.insert("alignment_facing");
  const double Mf = ctx.grid.width() + ctx.grid.length();

  for (const auto& pair : ctx.sg.constraints.alignment_pairs) {
    int rk = room_index_by_id(ctx.sg, pair.room);
    int l1 = item_index_by_id(ctx.sg.rooms[rk], pair.l1);
    int l2 = item_index_by_id(ctx.sg.rooms[rk], pair.l2);
    Row& row = model.add_row("alg_" + std::to_string(pair.room) + "_" +
                                 std::to_string(pair.l1) + "_" +
                                 std::to_string(pair.l2),
                             RowSense::EQ, 0.0);
    row.terms = {{ctx.sigma[rk][l1], 1.0}, {ctx.sigma[rk][l2], -1.0}};
  }

  for (const auto& pair : ctx.sg.constraints.facing_pairs) {
    int rk = room_index_by_id(ctx.sg, pair.room);
    int l1 = item_index_by_id(ctx.sg.rooms[rk], pair.l1);
    int l2 = item_index_by_id(ctx.sg.rooms[rk], pair.l2);
    const auto& cs = ctx.cases[rk][l1];
    const std::string base = "fcg_" + std::to_string(pair.room) + "_" +
                             std::to_string(pair.l1) + "_" +
                             std::to_string(pair.l2) + "_";
    int xmi1 = ctx.xi_min_i[rk][l1], xmj1 = ctx.xi_min_j[rk][l1];
    int xmi2 = ctx.xi_min_i[rk][l2], xmj2 = ctx.xi_min_j[rk][l2];
    // One row per orientation case: the second object's corner must lie on
    // the side the first object faces.
    {
      Row& row = model.add_row(base + "e", RowSense::GE, -Mf);
      row.terms = {{xmi2, 1.0}, {xmi1, -1.0}, {cs[0], -Mf}};
    }
    {
      Row& row = model.add_row(base + "w", RowSense::GE, -Mf);
      row.terms = {{xmi1, 1.0}, {xmi2, -1.0}, {cs[1], -Mf}};
    }
    {
      Row& row = model.add_row(base + "s", RowSense::GE, -Mf);
      row.terms = {{xmj1, 1.0}, {xmj2, -1.0}, {cs[2], -Mf}};
    }
    {
      Row& row = model.add_row(base + "n", RowSense::GE, -Mf);
      row.terms = {{xmj2, 1.0}, {xmj1, -1.0}, {cs[3], -Mf}};
    }
  }
}

void add_objectives(MilpModel& model) {
  const auto& ctx = require_context(model, "add_objectives");
  model.encoded.insert("objectives");
  const auto& w = ctx.sg.weights;
  const Grid& grid = ctx.grid;
  const int W = grid.width();
  const int L = grid.length();

  // Rectangularity: bounding-box area minus room area. The product
  // gamma_len_i * gamma_len_j is expanded over the integer values of
  // gamma_len_i with one indicator per value.
  if (w.rect > 0) {
    auto& g = model.group("rect", w.rect);
    const double Mr = static_cast<double>(W) * L;
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      const std::string rid = std::to_string(ctx.sg.rooms[rk].id);
      int ra = model.add_var("ra_" + rid, VarKind::Continuous, 0, Mr);
      std::vector<int> lams;
      for (int t = 1; t <= W; ++t) {
        lams.push_back(model.add_var("lam_" + rid + "_" + std::to_string(t),
                                     VarKind::Binary, 0, 1));
      }
      {
        RowAcc acc;
        for (int lam : lams) acc.add(lam, 1.0);
        Row& row = model.add_row("rls_" + rid, RowSense::EQ, 1.0);
        row.terms = acc.terms();
      }
      {
        RowAcc acc;
        acc.add(ctx.gamma_len_i[rk], 1.0);
        for (int t = 1; t <= W; ++t) acc.add(lams[t - 1], -static_cast<double>(t));
        Row& row = model.add_row("rll_" + rid, RowSense::EQ, 0.0);
        row.terms = acc.terms();
      }
      for (int t = 1; t <= W; ++t) {
        // When lam_t is off the row must hold for any gamma_len_j <= L and
        // ra >= 0, so t*L is the smallest safe activation constant.
        const double Mt = static_cast<double>(t) * L;
        Row& row = model.add_row("rla_" + rid + "_" + std::to_string(t),
                                 RowSense::LE, Mt);
        row.terms = {{ctx.gamma_len_j[rk], static_cast<double>(t)},
                     {ra, -1.0},
                     {lams[t - 1], Mt}};
      }
      // Lower bounds implied at every integer point but not by the indicator
      // rows alone; without them the relaxation lets ra collapse to zero and
      // the -x terms drag the root bound far below any real layout.
      {
        RowAcc acc;
        acc.add(ra, 1.0);
        for (size_t c = 0; c < ctx.cells.size(); ++c) acc.add(ctx.x[rk][c], -1.0);
        Row& row = model.add_row("rcc_" + rid, RowSense::GE, 0.0);
        row.terms = acc.terms();
      }
      {
        // (len_i - 1)(len_j - 1) >= 0
        Row& row = model.add_row("rcm1_" + rid, RowSense::GE, -1.0);
        row.terms = {{ra, 1.0},
                     {ctx.gamma_len_i[rk], -1.0},
                     {ctx.gamma_len_j[rk], -1.0}};
      }
      {
        // (W - len_i)(L - len_j) >= 0
        Row& row = model.add_row("rcm2_" + rid, RowSense::GE, -Mr);
        row.terms = {{ra, 1.0},
                     {ctx.gamma_len_i[rk], -static_cast<double>(L)},
                     {ctx.gamma_len_j[rk], -static_cast<double>(W)}};
      }
      g.terms.push_back(LinTerm{ra, 1.0});
      for (size_t c = 0; c < ctx.cells.size(); ++c) {
        g.terms.push_back(LinTerm{ctx.x[rk][c], -1.0});
      }
    }
  }

  // Perimeter: for each room, edges whose two cells disagree on membership,
  // plus boundary exposure.
  if (w.perim > 0) {
    auto& g = model.group("perim", w.perim);
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      const std::string rid = std::to_string(ctx.sg.rooms[rk].id);
      for (size_t c = 0; c < ctx.cells.size(); ++c) {
        Cell cell = ctx.cells[c];
        int void_degree = 0;
        for (Direction d : kDirections) {
          if (!grid.adj(cell, d).has_value()) ++void_degree;
        }
        if (void_degree > 0) {
          g.terms.push_back(LinTerm{ctx.x[rk][c], static_cast<double>(void_degree)});
        }
        for (Direction d : {Direction::E, Direction::N}) {
          auto n = grid.adj(cell, d);
          if (!n.has_value()) continue;
          int nc = ctx.cell_index(*n);
          int pe = model.add_var("pe_" + rid + cell_suffix(cell) + "_" +
                                     std::string(1, direction_letter(d)),
                                 VarKind::Continuous, 0, kInf);
          {
            Row& row = model.add_row(
                "pea_" + rid + cell_suffix(cell) + "_" +
                    std::string(1, direction_letter(d)),
                RowSense::LE, 0.0);
            row.terms = {{ctx.x[rk][c], 1.0}, {ctx.x[rk][nc], -1.0}, {pe, -1.0}};
          }
          {
            Row& row = model.add_row(
                "peb_" + rid + cell_suffix(cell) + "_" +
                    std::string(1, direction_letter(d)),
                RowSense::LE, 0.0);
            row.terms = {{ctx.x[rk][nc], 1.0}, {ctx.x[rk][c], -1.0}, {pe, -1.0}};
          }
          g.terms.push_back(LinTerm{pe, 1.0});
        }
      }
    }
  }

  // Area deviation from the target number of cells.
  if (w.area > 0) {
    auto& g = model.group("area", w.area);
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      const std::string rid = std::to_string(ctx.sg.rooms[rk].id);
      const double target = ctx.sg.rooms[rk].target_area_cells;
      int ar = model.add_var("ar_" + rid, VarKind::Continuous, 0, kInf);
      {
        RowAcc acc;
        for (size_t c = 0; c < ctx.cells.size(); ++c) acc.add(ctx.x[rk][c], 1.0);
        acc.add(ar, 1.0);
        Row& row = model.add_row("ara_" + rid, RowSense::GE, target);
        row.terms = acc.terms();
      }
      {
        RowAcc acc;
        for (size_t c = 0; c < ctx.cells.size(); ++c) acc.add(ctx.x[rk][c], 1.0);
        acc.add(ar, -1.0);
        Row& row = model.add_row("arb_" + rid, RowSense::LE, target);
        row.terms = acc.terms();
      }
      g.terms.push_back(LinTerm{ar, 1.0});
    }
  }

  // Aspect: absolute difference of the bounding-box side lengths.
  if (w.aspect > 0) {
    auto& g = model.group("aspect", w.aspect);
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      const std::string rid = std::to_string(ctx.sg.rooms[rk].id);
      int as = model.add_var("as_" + rid, VarKind::Continuous, 0, kInf);
      {
        Row& row = model.add_row("asa_" + rid, RowSense::LE, 0.0);
        row.terms = {{ctx.gamma_len_i[rk], 1.0},
                     {ctx.gamma_len_j[rk], -1.0},
                     {as, -1.0}};
      }
      {
        Row& row = model.add_row("asb_" + rid, RowSense::LE, 0.0);
        row.terms = {{ctx.gamma_len_j[rk], 1.0},
                     {ctx.gamma_len_i[rk], -1.0},
                     {as, -1.0}};
      }
      g.terms.push_back(LinTerm{as, 1.0});
    }
  }

  // Relative placement: L1 distance between object centers and the target
  // offset, in doubled coordinates (2 * center = 2 * xi_min + len - 1).
  if (w.rel > 0 && !ctx.coarse && !ctx.sg.constraints.relative_offsets.empty()) {
    auto& g = model.group("rel", w.rel);
    for (const auto& rel : ctx.sg.constraints.relative_offsets) {
      int rk = room_index_by_id(ctx.sg, rel.room);
      const auto& room = ctx.sg.rooms[rk];
      int l1 = item_index_by_id(room, rel.l1);
      int l2 = item_index_by_id(room, rel.l2);
      const auto& i1 = room.furniture[l1];
      const auto& i2 = room.furniture[l2];
      const std::string base = std::to_string(rel.room) + "_" +
                               std::to_string(rel.l1) + "_" + std::to_string(rel.l2);
      struct Axis {
        int xm1, xm2;
        double s1, s2;  // sigma coefficients of the doubled center
        double c1, c2;  // constant part of the doubled center
        double delta2;  // doubled target offset
        const char* tag;
      };
      const Axis axes[2] = {
          {ctx.xi_min_i[rk][l1], ctx.xi_min_i[rk][l2],
           static_cast<double>(i1.length_cells - i1.width_cells),
           static_cast<double>(i2.length_cells - i2.width_cells),
           static_cast<double>(i1.width_cells - 1),
           static_cast<double>(i2.width_cells - 1), 2.0 * rel.di, "i"},
          {ctx.xi_min_j[rk][l1], ctx.xi_min_j[rk][l2],
           static_cast<double>(i1.width_cells - i1.length_cells),
           static_cast<double>(i2.width_cells - i2.length_cells),
           static_cast<double>(i1.length_cells - 1),
           static_cast<double>(i2.length_cells - 1), 2.0 * rel.dj, "j"},
      };
      for (const Axis& ax : axes) {
        int rl = model.add_var("rl_" + base + "_" + ax.tag, VarKind::Continuous, 0, kInf);
        // diff = (2*xm1 + s1*sig1 + c1) - (2*xm2 + s2*sig2 + c2) - delta2
        double rhs_const = ax.c1 - ax.c2 - ax.delta2;
        {
          RowAcc acc;
          acc.add(rl, 1.0);
          acc.add(ax.xm1, -2.0);
          acc.add(ctx.sigma[rk][l1], -ax.s1);
          acc.add(ax.xm2, 2.0);
          acc.add(ctx.sigma[rk][l2], ax.s2);
          Row& row = model.add_row("rla_" + base + "_" + ax.tag, RowSense::GE, rhs_const);
          row.terms = acc.terms();
        }
        {
          RowAcc acc;
          acc.add(rl, 1.0);
          acc.add(ax.xm1, 2.0);
          acc.add(ctx.sigma[rk][l1], ax.s1);
          acc.add(ax.xm2, -2.0);
          acc.add(ctx.sigma[rk][l2], -ax.s2);
          Row& row = model.add_row("rlb_" + base + "_" + ax.tag, RowSense::GE, -rhs_const);
          row.terms = acc.terms();
        }
        g.terms.push_back(LinTerm{rl, 0.5});
      }
    }
  }

  // Balance: area-weighted furniture centroid vs room bounding-box center,
  // in doubled coordinates, normalised by twice the total furniture area.
  if (w.bal > 0 && !ctx.coarse) {
    bool any = false;
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      if (!ctx.sg.rooms[rk].furniture.empty()) any = true;
    }
    if (any) {
      auto& g = model.group("bal", w.bal);
      for (int rk = 0; rk < ctx.room_count(); ++rk) {
        const auto& room = ctx.sg.rooms[rk];
        if (room.furniture.empty()) continue;
        const std::string rid = std::to_string(room.id);
        double total_area = 0;
        for (const auto& item : room.furniture) total_area += item.footprint();
        struct Axis {
          int gm, gl;
          const char* tag;
          bool is_i;
        };
        const Axis axes[2] = {{ctx.gamma_min_i[rk], ctx.gamma_len_i[rk], "i", true},
                              {ctx.gamma_min_j[rk], ctx.gamma_len_j[rk], "j", false}};
        for (const Axis& ax : axes) {
          int bl = model.add_var("bl_" + rid + "_" + ax.tag, VarKind::Continuous, 0, kInf);
          // expr = sum_l A_l * (2*xm_l + s_l*sig_l + c_l)
          //        - T * (2*gm + gl - 1)
          RowAcc plus;   // bl - expr_vars >= expr_const
          RowAcc minus;  // bl + expr_vars >= -expr_const
          double expr_const = total_area;  // the +T from -T*(-1)
          for (size_t l = 0; l < room.furniture.size(); ++l) {
            const auto& item = room.furniture[l];
            double a = item.footprint();
            int xm = ax.is_i ? ctx.xi_min_i[rk][l] : ctx.xi_min_j[rk][l];
            double s = ax.is_i
                           ? static_cast<double>(item.length_cells - item.width_cells)
                           : static_cast<double>(item.width_cells - item.length_cells);
            double c0 = ax.is_i ? item.width_cells - 1 : item.length_cells - 1;
            plus.add(xm, -2.0 * a);
            plus.add(ctx.sigma[rk][l], -a * s);
            minus.add(xm, 2.0 * a);
            minus.add(ctx.sigma[rk][l], a * s);
            expr_const += a * c0;
          }
          plus.add(ax.gm, 2.0 * total_area);
          plus.add(ax.gl, total_area);
          minus.add(ax.gm, -2.0 * total_area);
          minus.add(ax.gl, -total_area);
          plus.add(bl, 1.0);
          minus.add(bl, 1.0);
          {
            Row& row = model.add_row("bla_" + rid + "_" + ax.tag, RowSense::GE, expr_const);
            row.terms = plus.terms();
          }
          {
            Row& row =
                model.add_row("blb_" + rid + "_" + ax.tag, RowSense::GE, -expr_const);
            row.terms = minus.terms();
          }
          g.terms.push_back(LinTerm{bl, 1.0 / (2.0 * total_area)});
        }
      }
    }
  }

  // Privacy: rooms earlier in the order must sit at least as deep (by mean
  // Manhattan distance from the entrance) as later ones; slack is penalised.
  if (w.priv > 0 && ctx.sg.constraints.privacy_order.size() >= 2) {
    auto& g = model.group("priv", w.priv);
    const auto& order = ctx.sg.constraints.privacy_order;
    Cell e = grid.entrance();
    for (size_t r = 0; r + 1 < order.size(); ++r) {
      int rk1 = room_index_by_id(ctx.sg, order[r]);
      int rk2 = room_index_by_id(ctx.sg, order[r + 1]);
      int th = model.add_var("th_" + std::to_string(r + 1), VarKind::Continuous, 0, kInf);
      RowAcc acc;
      double a1 = ctx.sg.rooms[rk1].target_area_cells;
      double a2 = ctx.sg.rooms[rk2].target_area_cells;
      for (size_t c = 0; c < ctx.cells.size(); ++c) {
        Cell cell = ctx.cells[c];
        double dist = std::abs(cell.i - e.i) + std::abs(cell.j - e.j);
        if (dist != 0) {
          acc.add(ctx.x[rk1][c], dist / a1);
          acc.add(ctx.x[rk2][c], -dist / a2);
        }
      }
      acc.add(th, 1.0);
      Row& row = model.add_row("pv_" + std::to_string(r + 1), RowSense::GE, 0.0);
      row.terms = acc.terms();
      g.terms.push_back(LinTerm{th, 1.0});
    }
  }

  // Refinement: charge one unit for every fine cell that drops the room label
  // its coarse ancestor carried.
  if (w.ref > 0 && !ctx.coarse && ctx.hint) {
    const auto& hint = *ctx.hint;
    auto& g = model.group("ref", w.ref);
    for (size_t c = 0; c < ctx.cells.size(); ++c) {
      Cell cell = ctx.cells[c];
      int lin = cell.j * W + cell.i;
      int cc = hint.pi[lin];
      if (cc < 0) continue;
      int lab = hint.coarse_labels[cc];
      if (lab <= 0) continue;
      int rk = room_index_by_id(ctx.sg, lab);
      g.constant += 1.0;
      g.terms.push_back(LinTerm{ctx.x[rk][c], -1.0});
    }
  }

  model.refresh_metadata_counts();
}

MilpModel build_model(const SceneGraph& sg, const Grid& grid,
                      const std::string& phase,
                      std::shared_ptr<const CoarseHint> hint) {
  if (phase != "direct" && phase != "coarse" && phase != "fine") {
    throw BuildError("unknown build phase '" + phase + "'");
  }
  bool coarse = phase == "coarse";
  if (phase != "fine") hint = nullptr;
  try {
    MilpModel model = declare_variables(sg, grid, coarse, hint);
    model.metadata.phase = phase;
    encode_non_overlap(model);
    encode_connectivity(model);
    encode_accessibility(model);
    encode_adjacency(model);
    encode_room_bbox(model);
    encode_corner(model);
    encode_furniture(model);
    encode_against_wall(model);
    encode_alignment_facing(model);
    add_objectives(model);
    if (phase == "fine" && model.context->hint) {
      model.warm_start = model.context->hint->warm_start;
    }
    model.refresh_metadata_counts();
    return model;
  } catch (const Error& err) {
    throw BuildError(std::string(err.kind) + ": " + err.what());
  }
}

std::vector<double> layout_to_values(const MilpModel& model, const Layout& layout) {
  const auto& ctx = require_context(model, "layout_to_values");
  std::vector<double> values(model.variables.size(), kNaN);

  for (size_t c = 0; c < ctx.cells.size(); ++c) {
    Cell cell = ctx.cells[c];
    int lab = layout.label(cell);
    values[ctx.p[c]] = lab == Layout::kCorridor ? 1.0 : 0.0;
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      values[ctx.x[rk][c]] = lab == ctx.sg.rooms[rk].id ? 1.0 : 0.0;
    }
  }

  if (!ctx.coarse) {
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      const auto& room = ctx.sg.rooms[rk];
      for (int l = 0; l < ctx.item_count(rk); ++l) {
        const auto& item = room.furniture[l];
        const Layout::Box* box = nullptr;
        for (const auto& b : layout.furniture) {
          if (b.room == room.id && b.id == item.id) box = &b;
        }
        if (box == nullptr) {
          throw InvalidModel("layout is missing furniture " + std::to_string(item.id) +
                             " of room " + std::to_string(room.id));
        }
        int sigma = box->nu_i != 0 ? 1 : 0;
        int mu = (box->nu_i < 0 || box->nu_j < 0) ? 1 : 0;
        values[ctx.sigma[rk][l]] = sigma;
        values[ctx.mu[rk][l]] = mu;
        for (size_t c = 0; c < ctx.cells.size(); ++c) {
          Cell cell = ctx.cells[c];
          bool inside = cell.i >= box->origin.i && cell.i < box->origin.i + box->len_i &&
                        cell.j >= box->origin.j && cell.j < box->origin.j + box->len_j;
          values[ctx.f[rk][l][c]] = inside ? 1.0 : 0.0;
        }
      }
    }
  }
  return values;
}

namespace {

struct FlowPlan {
  // flow[cell][dir] values; empty when infeasible.
  bool feasible = false;
  std::vector<std::array<double, 4>> flow;
};

// Routes supply from the entrance through traversable cells. Mirrors the
// LP's conservation rows exactly: total void outflow must equal q(entrance),
// so the corridor is feasible only if either nothing is traversable or the
// entrance is, every traversable cell is reachable, and some reachable cell
// touches the grid boundary or an outdoor cell.
FlowPlan route_corridor(const BuildContext& ctx, const std::vector<char>& q) {
  const Grid& grid = ctx.grid;
  const int n = static_cast<int>(ctx.cells.size());
  FlowPlan plan;
  plan.flow.assign(n, {0.0, 0.0, 0.0, 0.0});

  int total_q = 0;
  for (int c = 0; c < n; ++c) total_q += q[c];
  if (total_q == 0) {
    plan.feasible = true;
    return plan;
  }

  const int e = ctx.cell_index(grid.entrance());
  if (!q[e]) return plan;

  std::vector<int> parent(n, -1), parent_dir(n, -1), bfs_order;
  std::vector<char> seen(n, 0);
  std::deque<int> queue{e};
  seen[e] = 1;
  while (!queue.empty()) {
    int c = queue.front();
    queue.pop_front();
    bfs_order.push_back(c);
    Cell cell = ctx.cells[c];
    for (int d = 0; d < 4; ++d) {
      auto nb = grid.adj(cell, kDirections[d]);
      if (!nb.has_value()) continue;
      int nc = ctx.cell_index(*nb);
      if (!q[nc] || seen[nc]) continue;
      seen[nc] = 1;
      parent[nc] = c;
      parent_dir[nc] = d;
      queue.push_back(nc);
    }
  }
  if (static_cast<int>(bfs_order.size()) != total_q) return plan;

  // Supply must be able to leave the network somewhere reachable.
  int dump = -1, dump_dir = -1;
  for (int c : bfs_order) {
    Cell cell = ctx.cells[c];
    for (int d = 0; d < 4; ++d) {
      if (!grid.adj(cell, kDirections[d]).has_value()) {
        dump = c;
        dump_dir = d;
        break;
      }
    }
    if (dump >= 0) break;
  }
  if (dump < 0) return plan;

  // Tree flows carry one unit per cell in the subtree.
  std::vector<double> subtree(n, 0.0);
  for (auto it = bfs_order.rbegin(); it != bfs_order.rend(); ++it) {
    int c = *it;
    subtree[c] += 1.0;
    if (parent[c] >= 0) {
      subtree[parent[c]] += subtree[c];
      plan.flow[parent[c]][parent_dir[c]] = subtree[c];
    }
  }
  // Route the entrance's own unit out through the dump cell.
  for (int c = dump; parent[c] >= 0; c = parent[c]) {
    plan.flow[parent[c]][parent_dir[c]] += 1.0;
  }
  plan.flow[dump][dump_dir] += 1.0;
  plan.feasible = true;
  return plan;
}

}  // namespace

namespace detail {

RoomBoxChoice best_room_box(const ObjectiveWeights& w, int W, int L,
                            const RoomGeometry& rg, double acc_i, double acc_j,
                            double total_area, bool use_bal) {
  int tight_i = rg.empty ? 1 : rg.max_i - rg.min_i + 1;
  int tight_j = rg.empty ? 1 : rg.max_j - rg.min_j + 1;

  // Best placement of the box start for one axis and length, for the balance
  // term; everything else is independent of gamma_min.
  auto best_min = [&](int len, int lo_cell, int hi_cell, int limit, double acc,
                      double* cost) -> int {
    int lo = rg.empty ? 0 : std::max(0, hi_cell + 1 - len);
    int hi = rg.empty ? limit - len : std::min(lo_cell, limit - len);
    if (!use_bal) {
      *cost = 0;
      return lo;
    }
    // minimise |acc - T*(2m + len - 1)| over integer m in [lo, hi]
    double ideal = (acc / total_area - len + 1) / 2.0;
    int cand = static_cast<int>(std::llround(ideal));
    int best = std::clamp(cand, lo, hi);
    double best_cost = std::abs(acc - total_area * (2.0 * best + len - 1));
    for (int m : {best - 1, best + 1, lo, hi}) {
      if (m < lo || m > hi) continue;
      double cost_m = std::abs(acc - total_area * (2.0 * m + len - 1));
      if (cost_m < best_cost - 1e-12 ||
          (cost_m < best_cost + 1e-12 && m < best)) {
        best = m;
        best_cost = cost_m;
      }
    }
    *cost = best_cost;
    return best;
  };

  RoomBoxChoice choice;
  double best_total = std::numeric_limits<double>::infinity();
  for (int li = tight_i; li <= W; ++li) {
    double cost_i;
    int mi = best_min(li, rg.empty ? 0 : rg.min_i, rg.empty ? 0 : rg.max_i, W,
                      acc_i, &cost_i);
    for (int lj = tight_j; lj <= L; ++lj) {
      double cost_j;
      int mj = best_min(lj, rg.empty ? 0 : rg.min_j, rg.empty ? 0 : rg.max_j, L,
                        acc_j, &cost_j);
      double total = w.rect * (static_cast<double>(li) * lj) +
                     w.aspect * std::abs(li - lj);
      if (use_bal) total += w.bal * (cost_i + cost_j) / (2.0 * total_area);
      if (total < best_total - 1e-12) {
        best_total = total;
        choice = RoomBoxChoice{mi, mj, li, lj, total};
      }
    }
  }
  return choice;
}

}  // namespace detail

bool complete_solution(const MilpModel& model, std::vector<double>& values) {
  const auto& ctx = require_context(model, "complete_solution");
  const Grid& grid = ctx.grid;
  const auto& sg = ctx.sg;
  const int n = static_cast<int>(ctx.cells.size());
  const int W = grid.width();
  const int L = grid.length();

  auto as_bit = [&](int var) -> int {
    double v = values[var];
    if (!(v == 0.0 || v == 1.0)) {
      if (std::isnan(v)) return -1;
      v = std::round(v);
    }
    return v >= 0.5 ? 1 : 0;
  };
  auto set_if = [&](const std::string& name, double v) {
    int idx = model.var(name);
    if (idx >= 0) values[idx] = v;
  };
  const bool with_furniture = !ctx.coarse && model.encoded.count("furniture") > 0;

  // Labels and the basic partition.
  std::vector<int> label(n, -1);  // room index, -2 corridor
  for (int c = 0; c < n; ++c) {
    int count = 0;
    if (as_bit(ctx.p[c]) == 1) {
      label[c] = -2;
      ++count;
    }
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      if (as_bit(ctx.x[rk][c]) == 1) {
        label[c] = rk;
        ++count;
      }
    }
    if (count != 1) return false;
  }

  // Furniture boxes: exact rectangles of the right footprint inside the room.
  std::vector<std::vector<char>> occupied(ctx.room_count(),
                                          std::vector<char>(n, 0));
  std::vector<std::vector<BoxInfo>> boxes(ctx.room_count());
  if (with_furniture) {
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      const auto& room = sg.rooms[rk];
      boxes[rk].resize(room.furniture.size());
      for (int l = 0; l < ctx.item_count(rk); ++l) {
        const auto& item = room.furniture[l];
        int sigma = as_bit(ctx.sigma[rk][l]);
        int mu = as_bit(ctx.mu[rk][l]);
        if (sigma < 0 || mu < 0) return false;
        int li = len_i_of(item, sigma), lj = len_j_of(item, sigma);
        int min_i = W, max_i = -1, min_j = L, max_j = -1, count = 0;
        for (int c = 0; c < n; ++c) {
          if (as_bit(ctx.f[rk][l][c]) != 1) continue;
          Cell cell = ctx.cells[c];
          if (label[c] != rk) return false;       // containment
          if (occupied[rk][c]) return false;      // overlap within the room
          occupied[rk][c] = 1;
          min_i = std::min(min_i, cell.i);
          max_i = std::max(max_i, cell.i);
          min_j = std::min(min_j, cell.j);
          max_j = std::max(max_j, cell.j);
          ++count;
        }
        if (count != li * lj) return false;
        if (max_i - min_i + 1 != li || max_j - min_j + 1 != lj) return false;
        boxes[rk][l] = BoxInfo{min_i, min_j, li, lj, sigma, mu};
      }
    }
  }

  // Corridor connectivity with an explicit routing certificate.
  std::vector<char> q(n, 0);
  for (int c = 0; c < n; ++c) {
    if (label[c] == -2) {
      q[c] = 1;
    } else if (label[c] >= 0 && sg.rooms[label[c]].open && !occupied[label[c]][c]) {
      q[c] = 1;
    }
  }
  if (model.encoded.count("connectivity")) {
    FlowPlan plan = route_corridor(ctx, q);
    if (!plan.feasible) return false;
    for (int c = 0; c < n; ++c) {
      for (int d = 0; d < 4; ++d) values[ctx.flow[c][d]] = plan.flow[c][d];
    }
  }

  // Accessibility witnesses for closed rooms.
  for (int rk = 0; rk < ctx.room_count() && model.encoded.count("accessibility");
       ++rk) {
    const auto& room = sg.rooms[rk];
    if (room.open) continue;
    const std::string base = "al_" + std::to_string(room.id);
    int witness = -1;
    for (int c = 0; c < n; ++c) {
      if (label[c] != rk || occupied[rk][c]) continue;
      bool ok = false;
      for (Cell nb : grid.neighbors(ctx.cells[c])) {
        if (grid.indoor(nb) && q[ctx.cell_index(nb)]) ok = true;
      }
      if (ok) {
        witness = c;
        break;
      }
    }
    if (witness < 0) return false;
    for (int c = 0; c < n; ++c) {
      int al = model.var(base + cell_suffix(ctx.cells[c]));
      if (al >= 0) values[al] = c == witness ? 1.0 : 0.0;
    }
  }

  // Adjacency witnesses.
  if (model.encoded.count("adjacency")) {
    for (const auto& pair : sg.constraints.adjacency_pairs) {
      int rk = room_index_by_id(sg, pair.k);
      int rm = room_index_by_id(sg, pair.m);
      const std::string base =
          "bt_" + std::to_string(pair.k) + "_" + std::to_string(pair.m);
      int witness = -1;
      for (int c = 0; c < n && witness < 0; ++c) {
        if (label[c] != rk) continue;
        for (Cell nb : grid.neighbors(ctx.cells[c])) {
          if (grid.indoor(nb) && label[ctx.cell_index(nb)] == rm) {
            witness = c;
            break;
          }
        }
      }
      if (witness < 0) return false;
      for (int c = 0; c < n; ++c) {
        int bt = model.var(base + cell_suffix(ctx.cells[c]));
        if (bt >= 0) values[bt] = c == witness ? 1.0 : 0.0;
      }
    }
  }

  // Against-wall witnesses, orientation case binaries, facing checks.
  if (with_furniture) {
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      const auto& room = sg.rooms[rk];
      for (int l = 0; l < ctx.item_count(rk); ++l) {
        const auto& item = room.furniture[l];
        const BoxInfo& box = boxes[rk][l];
        if (ctx.cases[rk][l][0] >= 0) {
          int active = case_of(box.sigma, box.mu);
          for (int d = 0; d < 4; ++d) {
            values[ctx.cases[rk][l][d]] = d == active ? 1.0 : 0.0;
          }
        }
        if (!item.against_wall || !model.encoded.count("against_wall")) continue;
        auto [nu_i, nu_j] = nu_of(box.sigma, box.mu);
        // Every occupied cell faces into the room.
        for (int c = 0; c < n; ++c) {
          if (as_bit(ctx.f[rk][l][c]) != 1) continue;
          Cell front{ctx.cells[c].i + nu_i, ctx.cells[c].j + nu_j};
          if (!grid.indoor(front)) return false;
          if (label[ctx.cell_index(front)] != rk) return false;
        }
        // Some occupied cell touches a wall.
        const std::string base =
            "ph_" + std::to_string(room.id) + "_" + std::to_string(item.id);
        int witness = -1;
        for (int c = 0; c < n && witness < 0; ++c) {
          if (as_bit(ctx.f[rk][l][c]) != 1) continue;
          for (Direction d : kDirections) {
            auto nb = grid.adj(ctx.cells[c], d);
            if (!nb.has_value() || label[ctx.cell_index(*nb)] != rk) {
              witness = c;
              break;
            }
          }
        }
        if (witness < 0) return false;
        for (int c = 0; c < n; ++c) {
          int ph = model.var(base + cell_suffix(ctx.cells[c]));
          if (ph >= 0) values[ph] = c == witness ? 1.0 : 0.0;
        }
      }
    }
    if (model.encoded.count("alignment_facing")) {
      for (const auto& pair : sg.constraints.facing_pairs) {
        int rk = room_index_by_id(sg, pair.room);
        int l1 = item_index_by_id(sg.rooms[rk], pair.l1);
        int l2 = item_index_by_id(sg.rooms[rk], pair.l2);
        const BoxInfo& b1 = boxes[rk][l1];
        const BoxInfo& b2 = boxes[rk][l2];
        auto [nu_i, nu_j] = nu_of(b1.sigma, b1.mu);
        int dot = nu_i * (b2.min_i - b1.min_i) + nu_j * (b2.min_j - b1.min_j);
        if (dot < 0) return false;
      }
    }
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      for (int l = 0; l < ctx.item_count(rk); ++l) {
        values[ctx.xi_min_i[rk][l]] = boxes[rk][l].min_i;
        values[ctx.xi_min_j[rk][l]] = boxes[rk][l].min_j;
      }
    }
  }

  // Room geometry, then the bounding boxes that minimise the objective.
  std::vector<RoomGeometry> geo(ctx.room_count());
  for (int c = 0; c < n; ++c) {
    if (label[c] >= 0) geo[label[c]].add(ctx.cells[c]);
  }

  const auto& w = sg.weights;
  for (int rk = 0; rk < ctx.room_count(); ++rk) {
    const auto& room = sg.rooms[rk];
    const RoomGeometry& rg = geo[rk];

    // Doubled centroid accumulators for the balance term.
    double acc_i = 0, acc_j = 0, total_area = 0;
    bool use_bal = false;
    if (with_furniture && !room.furniture.empty() &&
        model.var("bl_" + std::to_string(room.id) + "_i") >= 0) {
      use_bal = true;
      for (int l = 0; l < ctx.item_count(rk); ++l) {
        const auto& item = room.furniture[l];
        const BoxInfo& box = boxes[rk][l];
        double a = item.footprint();
        acc_i += a * (2.0 * box.min_i + box.len_i - 1);
        acc_j += a * (2.0 * box.min_j + box.len_j - 1);
        total_area += a;
      }
    }

    detail::RoomBoxChoice pick =
        detail::best_room_box(w, W, L, rg, acc_i, acc_j, total_area, use_bal);

    values[ctx.gamma_min_i[rk]] = pick.mi;
    values[ctx.gamma_min_j[rk]] = pick.mj;
    values[ctx.gamma_len_i[rk]] = pick.li;
    values[ctx.gamma_len_j[rk]] = pick.lj;

    const std::string rid = std::to_string(room.id);
    for (int t = 1; t <= W; ++t) {
      set_if("lam_" + rid + "_" + std::to_string(t), t == pick.li ? 1.0 : 0.0);
    }
    set_if("ra_" + rid, static_cast<double>(pick.li) * pick.lj);
    set_if("as_" + rid, std::abs(pick.li - pick.lj));
    set_if("ar_" + rid,
           std::abs(static_cast<double>(room.target_area_cells) - rg.count));
    if (use_bal) {
      double ci = acc_i - total_area * (2.0 * pick.mi + pick.li - 1);
      double cj = acc_j - total_area * (2.0 * pick.mj + pick.lj - 1);
      set_if("bl_" + rid + "_i", std::abs(ci));
      set_if("bl_" + rid + "_j", std::abs(cj));
    }
  }

  // Perimeter auxiliaries.
  if (w.perim > 0) {
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      const std::string rid = std::to_string(sg.rooms[rk].id);
      for (int c = 0; c < n; ++c) {
        Cell cell = ctx.cells[c];
        for (Direction d : {Direction::E, Direction::N}) {
          auto nb = grid.adj(cell, d);
          if (!nb.has_value()) continue;
          int pe = model.var("pe_" + rid + cell_suffix(cell) + "_" +
                             std::string(1, direction_letter(d)));
          if (pe < 0) continue;
          int a = label[c] == rk ? 1 : 0;
          int b = label[ctx.cell_index(*nb)] == rk ? 1 : 0;
          values[pe] = std::abs(a - b);
        }
      }
    }
  }

  // Relative-offset auxiliaries.
  if (with_furniture && w.rel > 0) {
    for (const auto& rel : sg.constraints.relative_offsets) {
      int rk = room_index_by_id(sg, rel.room);
      const auto& room = sg.rooms[rk];
      int l1 = item_index_by_id(room, rel.l1);
      int l2 = item_index_by_id(room, rel.l2);
      const BoxInfo& b1 = boxes[rk][l1];
      const BoxInfo& b2 = boxes[rk][l2];
      const std::string base = std::to_string(rel.room) + "_" +
                               std::to_string(rel.l1) + "_" + std::to_string(rel.l2);
      double di = (2.0 * b1.min_i + b1.len_i - 1) - (2.0 * b2.min_i + b2.len_i - 1) -
                  2.0 * rel.di;
      double dj = (2.0 * b1.min_j + b1.len_j - 1) - (2.0 * b2.min_j + b2.len_j - 1) -
                  2.0 * rel.dj;
      int rli = model.var("rl_" + base + "_i");
      int rlj = model.var("rl_" + base + "_j");
      if (rli >= 0) values[rli] = std::abs(di);
      if (rlj >= 0) values[rlj] = std::abs(dj);
    }
  }

  // Privacy slacks.
  if (w.priv > 0 && sg.constraints.privacy_order.size() >= 2) {
    const auto& order = sg.constraints.privacy_order;
    Cell e = grid.entrance();
    auto depth = [&](int room_id) {
      int rk = room_index_by_id(sg, room_id);
      double sum = 0;
      for (int c = 0; c < n; ++c) {
        if (label[c] != rk) continue;
        sum += std::abs(ctx.cells[c].i - e.i) + std::abs(ctx.cells[c].j - e.j);
      }
      return sum / sg.rooms[rk].target_area_cells;
    };
    for (size_t r = 0; r + 1 < order.size(); ++r) {
      int th = model.var("th_" + std::to_string(r + 1));
      if (th < 0) continue;
      values[th] = std::max(0.0, depth(order[r + 1]) - depth(order[r]));
    }
  }

  std::string violation;
  if (!satisfies_rows(model, values, 1e-6, &violation)) {
    throw InvalidModel("completed assignment violates " + violation);
  }
  return true;
}

bool satisfies_rows(const MilpModel& model, const std::vector<double>& values,
                    double tol, std::string* first_violation) {
  for (const auto& row : model.rows) {
    double lhs = 0.0;
    for (const auto& t : row.terms) {
      double v = values[t.var];
      if (std::isnan(v)) {
        if (first_violation) *first_violation = row.name + " (unset " +
                                                model.variables[t.var].name + ")";
        return false;
      }
      lhs += t.coef * v;
    }
    bool ok = true;
    switch (row.sense) {
      case RowSense::LE: ok = lhs <= row.rhs + tol; break;
      case RowSense::GE: ok = lhs >= row.rhs - tol; break;
      case RowSense::EQ: ok = std::abs(lhs - row.rhs) <= tol; break;
    }
    if (!ok) {
      if (first_violation) {
        std::ostringstream oss;
        oss << row.name << " (lhs=" << lhs << " rhs=" << row.rhs << ")";
        *first_violation = oss.str();
      }
      return false;
    }
  }
  return true;
}

Layout decode_layout(const MilpModel& model, const std::vector<double>& values) {
  const auto& ctx = require_context(model, "decode_layout");
  const Grid& grid = ctx.grid;
  Layout layout;
  layout.width = grid.width();
  layout.length = grid.length();
  layout.labels.assign(static_cast<size_t>(layout.width) * layout.length,
                       Layout::kOutside);

  for (size_t c = 0; c < ctx.cells.size(); ++c) {
    Cell cell = ctx.cells[c];
    int lab = Layout::kCorridor;
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      if (values[ctx.x[rk][c]] >= 0.5) lab = ctx.sg.rooms[rk].id;
    }
    layout.set_label(cell, lab);
  }

  if (!ctx.coarse) {
    for (int rk = 0; rk < ctx.room_count(); ++rk) {
      const auto& room = ctx.sg.rooms[rk];
      for (int l = 0; l < ctx.item_count(rk); ++l) {
        const auto& item = room.furniture[l];
        int sigma = values[ctx.sigma[rk][l]] >= 0.5 ? 1 : 0;
        int mu = values[ctx.mu[rk][l]] >= 0.5 ? 1 : 0;
        Layout::Box box;
        box.room = room.id;
        box.id = item.id;
        box.len_i = len_i_of(item, sigma);
        box.len_j = len_j_of(item, sigma);
        auto [nu_i, nu_j] = nu_of(sigma, mu);
        box.nu_i = nu_i;
        box.nu_j = nu_j;
        int min_i = layout.width, min_j = layout.length;
        bool any = false;
        for (size_t c = 0; c < ctx.cells.size(); ++c) {
          if (values[ctx.f[rk][l][c]] >= 0.5) {
            any = true;
            min_i = std::min(min_i, ctx.cells[c].i);
            min_j = std::min(min_j, ctx.cells[c].j);
          }
        }
        if (!any) {
          throw InvalidModel("solution places no cells for furniture " +
                             std::to_string(item.id) + " of room " +
                             std::to_string(room.id));
        }
        box.origin = Cell{min_i, min_j};
        layout.furniture.push_back(box);
      }
    }
  }

  auto groups = model.eval_groups(values);
  double total = 0.0;
  for (const auto& g : model.objective) total += g.weight * groups[g.name];
  layout.objective_breakdown = std::move(groups);
  layout.objective_breakdown["total_weighted"] = total;
  return layout;
}

Layout decode_layout(const MilpModel& model,
                     const std::map<std::string, double>& values) {
  std::vector<double> vec(model.variables.size(), 0.0);
  for (const auto& [name, value] : values) {
    auto it = model.var_index.find(name);
    if (it != model.var_index.end()) vec[it->second] = value;
  }
  return decode_layout(model, vec);
}

}  // namespace gridplan
