#include "gridplan/validator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gridplan/coarse_to_fine.hpp"
#include "gridplan/common.hpp"

namespace gridplan {

namespace {

std::string cell_str(Cell c) {
  return "(" + std::to_string(c.i) + "," + std::to_string(c.j) + ")";
}

struct BoxView {
  const Layout::Box* box = nullptr;
  const FurnitureSpec* spec = nullptr;
  int room_idx = -1;
};

bool covers(const Layout::Box& b, Cell c) {
  return c.i >= b.origin.i && c.i < b.origin.i + b.len_i && c.j >= b.origin.j &&
         c.j < b.origin.j + b.len_j;
}

// Traversable set for the connectivity and accessibility checks: corridor
// cells plus open-room cells not covered by furniture.
std::vector<char> q_mask(const SceneGraph& sg, const Grid& grid,
                         const Layout& layout) {
  std::vector<char> q(static_cast<size_t>(grid.width()) * grid.length(), 0);
  for (Cell c : grid.indoor_cells()) {
    int lab = layout.label(c);
    bool traversable = lab == Layout::kCorridor;
    if (lab > 0) {
      const RoomSpec* room = sg.room_by_id(lab);
      traversable = room && room->open && !layout.furniture_covers(c);
    }
    q[static_cast<size_t>(c.j) * grid.width() + c.i] = traversable ? 1 : 0;
  }
  return q;
}

}  // namespace

const CheckResult* ValidationReport::find(const std::string& name) const {
  for (const auto& check : checks) {
    if (check.name == name) return &check;
  }
  return nullptr;
}

ValidationReport check_layout(const SceneGraph& sg, const Grid& grid,
                              const Layout& layout) {
  ValidationReport report;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    report.checks.push_back(CheckResult{name, pass, pass ? "" : detail});
    if (!pass) report.ok = false;
  };

  // Label totality: one label per indoor cell, outside marker elsewhere.
  {
    bool pass = layout.width == grid.width() && layout.length == grid.length();
    std::string detail = pass ? "" : "layout extents do not match the grid";
    for (int j = 0; pass && j < grid.length(); ++j) {
      for (int i = 0; pass && i < grid.width(); ++i) {
        Cell c{i, j};
        int lab = layout.label(c);
        if (!grid.indoor(c)) {
          if (lab != Layout::kOutside) {
            pass = false;
            detail = "outdoor cell " + cell_str(c) + " carries label " +
                     std::to_string(lab);
          }
        } else if (lab != Layout::kCorridor &&
                   (lab < 0 || sg.room_by_id(lab) == nullptr)) {
          pass = false;
          detail = "cell " + cell_str(c) + " has unknown label " +
                   std::to_string(lab);
        }
      }
    }
    add("labels", pass, detail);
    if (!pass) {
      // Everything downstream indexes by label; bail out early.
      return report;
    }
  }

  // Collect boxes against the spec: exactly one per declared item.
  std::vector<BoxView> views;
  {
    bool pass = true;
    std::string detail;
    std::set<std::pair<int, int>> seen;
    for (const Layout::Box& box : layout.furniture) {
      if (!seen.insert({box.room, box.id}).second) {
        pass = false;
        detail = "duplicate box for item " + std::to_string(box.room) + "/" +
                 std::to_string(box.id);
        break;
      }
      const FurnitureSpec* spec = sg.furniture_by_id(box.room, box.id);
      if (!spec) {
        pass = false;
        detail = "box references unknown item " + std::to_string(box.room) +
                 "/" + std::to_string(box.id);
        break;
      }
    }
    size_t declared = 0;
    for (const RoomSpec& room : sg.rooms) declared += room.furniture.size();
    if (pass && declared != layout.furniture.size()) {
      pass = false;
      detail = "scene declares " + std::to_string(declared) + " items, layout has " +
               std::to_string(layout.furniture.size());
    }

    // Shape: exact rectangle of the spec dims in the rotation nu implies.
    for (const Layout::Box& box : layout.furniture) {
      if (!pass) break;
      const FurnitureSpec* spec = sg.furniture_by_id(box.room, box.id);
      if (!spec) break;
      std::string tag = std::to_string(box.room) + "/" + std::to_string(box.id);
      if (std::abs(box.nu_i) + std::abs(box.nu_j) != 1) {
        pass = false;
        detail = "item " + tag + " facing is not an axis unit";
        break;
      }
      bool sigma = box.nu_i != 0;
      int want_i = sigma ? spec->length_cells : spec->width_cells;
      int want_j = sigma ? spec->width_cells : spec->length_cells;
      if (box.len_i != want_i || box.len_j != want_j) {
        pass = false;
        detail = "item " + tag + " is " + std::to_string(box.len_i) + "x" +
                 std::to_string(box.len_j) + ", expected " +
                 std::to_string(want_i) + "x" + std::to_string(want_j);
        break;
      }
      for (int i = box.origin.i; i < box.origin.i + box.len_i && pass; ++i) {
        for (int j = box.origin.j; j < box.origin.j + box.len_j && pass; ++j) {
          if (!grid.indoor(Cell{i, j})) {
            pass = false;
            detail = "item " + tag + " covers non-indoor cell " +
                     cell_str(Cell{i, j});
          }
        }
      }
    }
    add("furniture_shape", pass, detail);
    for (const Layout::Box& box : layout.furniture) {
      const FurnitureSpec* spec = sg.furniture_by_id(box.room, box.id);
      int rk = -1;
      for (size_t r = 0; r < sg.rooms.size(); ++r) {
        if (sg.rooms[r].id == box.room) rk = static_cast<int>(r);
      }
      if (spec && rk >= 0) views.push_back(BoxView{&box, spec, rk});
    }
  }

  // Containment: every covered cell belongs to the owning room.
  {
    bool pass = true;
    std::string detail;
    for (const BoxView& v : views) {
      for (int i = v.box->origin.i; i < v.box->origin.i + v.box->len_i && pass; ++i) {
        for (int j = v.box->origin.j; j < v.box->origin.j + v.box->len_j && pass;
             ++j) {
          Cell c{i, j};
          if (!grid.indoor(c) || layout.label(c) != v.box->room) {
            pass = false;
            detail = "item " + std::to_string(v.box->room) + "/" +
                     std::to_string(v.box->id) + " covers cell " + cell_str(c) +
                     " outside its room";
          }
        }
      }
    }
    add("furniture_containment", pass, detail);
  }

  // Pairwise disjoint boxes.
  {
    bool pass = true;
    std::string detail;
    for (size_t a = 0; a < views.size() && pass; ++a) {
      for (size_t b = a + 1; b < views.size() && pass; ++b) {
        const Layout::Box& ba = *views[a].box;
        const Layout::Box& bb = *views[b].box;
        bool overlap = ba.origin.i < bb.origin.i + bb.len_i &&
                       bb.origin.i < ba.origin.i + ba.len_i &&
                       ba.origin.j < bb.origin.j + bb.len_j &&
                       bb.origin.j < ba.origin.j + ba.len_j;
        if (overlap) {
          pass = false;
          detail = "items " + std::to_string(ba.room) + "/" +
                   std::to_string(ba.id) + " and " + std::to_string(bb.room) +
                   "/" + std::to_string(bb.id) + " overlap";
        }
      }
    }
    add("furniture_overlap", pass, detail);
  }

  // Corridor connectivity: BFS over traversable cells from the entrance must
  // reach them all, and the excess supply needs a boundary cell to leave by.
  std::vector<char> q = q_mask(sg, grid, layout);
  {
    bool pass = true;
    std::string detail;
    int total_q = 0;
    for (char v : q) total_q += v;
    if (total_q > 0) {
      Cell e = grid.entrance();
      if (!q[static_cast<size_t>(e.j) * grid.width() + e.i]) {
        pass = false;
        detail = "entrance " + cell_str(e) + " is not traversable";
      } else {
        std::deque<Cell> queue{e};
        std::set<std::pair<int, int>> seen{{e.i, e.j}};
        bool dump = false;
        while (!queue.empty()) {
          Cell c = queue.front();
          queue.pop_front();
          if (grid.has_void_neighbor(c)) dump = true;
          for (Cell nb : grid.neighbors(c)) {
            if (!q[static_cast<size_t>(nb.j) * grid.width() + nb.i]) continue;
            if (seen.insert({nb.i, nb.j}).second) queue.push_back(nb);
          }
        }
        if (static_cast<int>(seen.size()) != total_q) {
          for (Cell c : grid.indoor_cells()) {
            if (q[static_cast<size_t>(c.j) * grid.width() + c.i] &&
                !seen.count({c.i, c.j})) {
              detail = "traversable cell " + cell_str(c) +
                       " is unreachable from the entrance";
              break;
            }
          }
          pass = false;
        } else if (!dump) {
          pass = false;
          detail = "no reachable traversable cell touches the boundary";
        }
      }
    }
    add("connectivity", pass, detail);
  }

  // Accessibility: each closed room keeps a furniture-free cell next to a
  // traversable one.
  {
    bool pass = true;
    std::string detail;
    for (const RoomSpec& room : sg.rooms) {
      if (room.open || !pass) continue;
      bool found = false;
      for (Cell c : grid.indoor_cells()) {
        if (layout.label(c) != room.id || layout.furniture_covers(c)) continue;
        for (Cell nb : grid.neighbors(c)) {
          if (q[static_cast<size_t>(nb.j) * grid.width() + nb.i]) {
            found = true;
            break;
          }
        }
        if (found) break;
      }
      if (!found) {
        pass = false;
        detail = "room " + std::to_string(room.id) +
                 " has no free cell adjacent to a traversable one";
      }
    }
    add("accessibility", pass, detail);
  }

  // Required adjacencies share at least one edge.
  {
    bool pass = true;
    std::string detail;
    for (const AdjacencyPair& pair : sg.constraints.adjacency_pairs) {
      if (!pass) break;
      bool touch = false;
      for (Cell c : grid.indoor_cells()) {
        if (layout.label(c) != pair.k) continue;
        for (Cell nb : grid.neighbors(c)) {
          if (layout.label(nb) == pair.m) touch = true;
        }
        if (touch) break;
      }
      if (!touch) {
        pass = false;
        detail = "rooms " + std::to_string(pair.k) + " and " +
                 std::to_string(pair.m) + " do not touch";
      }
    }
    add("adjacency", pass, detail);
  }

  // Corner ownership.
  {
    bool pass = true;
    std::string detail;
    for (const RoomSpec& room : sg.rooms) {
      if (!room.corner_pref || !pass) continue;
      Cell c = corner_cell(*room.corner_pref, grid.width(), grid.length());
      if (!grid.indoor(c) || layout.label(c) != room.id) {
        pass = false;
        detail = "room " + std::to_string(room.id) + " does not own corner " +
                 corner_name(*room.corner_pref) + " " + cell_str(c);
      }
    }
    add("corner", pass, detail);
  }

  // Against-wall: the whole front row faces into the room and some covered
  // cell touches a wall (void or different label).
  {
    bool pass = true;
    std::string detail;
    for (const BoxView& v : views) {
      if (!v.spec->against_wall || !pass) continue;
      std::string tag =
          std::to_string(v.box->room) + "/" + std::to_string(v.box->id);
      bool touches = false;
      for (int i = v.box->origin.i; i < v.box->origin.i + v.box->len_i && pass; ++i) {
        for (int j = v.box->origin.j; j < v.box->origin.j + v.box->len_j && pass;
             ++j) {
          Cell c{i, j};
          Cell front{i + v.box->nu_i, j + v.box->nu_j};
          if (!grid.indoor(front) || layout.label(front) != v.box->room) {
            pass = false;
            detail = "item " + tag + " faces out of its room at " + cell_str(c);
            break;
          }
          for (Direction d : kDirections) {
            auto [di, dj] = offset(d);
            Cell nb{c.i + di, c.j + dj};
            if (!grid.indoor(nb) || layout.label(nb) != v.box->room) touches = true;
          }
        }
      }
      if (pass && !touches) {
        pass = false;
        detail = "item " + tag + " does not touch any wall";
      }
    }
    add("against_wall", pass, detail);
  }

  // Alignment pairs share an axis; facing pairs have a nonnegative dot
  // product between the first item's facing and the origin offset.
  {
    bool pass = true;
    std::string detail;
    auto box_of = [&](int room, int id) -> const Layout::Box* {
      for (const BoxView& v : views) {
        if (v.box->room == room && v.box->id == id) return v.box;
      }
      return nullptr;
    };
    for (const FurniturePair& pair : sg.constraints.alignment_pairs) {
      if (!pass) break;
      const Layout::Box* b1 = box_of(pair.room, pair.l1);
      const Layout::Box* b2 = box_of(pair.room, pair.l2);
      if (!b1 || !b2) {
        pass = false;
        detail = "alignment pair references missing boxes";
      } else if ((b1->nu_i != 0) != (b2->nu_i != 0)) {
        pass = false;
        detail = "items " + std::to_string(pair.l1) + " and " +
                 std::to_string(pair.l2) + " in room " +
                 std::to_string(pair.room) + " are not aligned";
      }
    }
    add("alignment", pass, detail);

    pass = true;
    detail.clear();
    for (const FurniturePair& pair : sg.constraints.facing_pairs) {
      if (!pass) break;
      const Layout::Box* b1 = box_of(pair.room, pair.l1);
      const Layout::Box* b2 = box_of(pair.room, pair.l2);
      if (!b1 || !b2) {
        pass = false;
        detail = "facing pair references missing boxes";
      } else {
        int dot = b1->nu_i * (b2->origin.i - b1->origin.i) +
                  b1->nu_j * (b2->origin.j - b1->origin.j);
        if (dot < 0) {
          pass = false;
          detail = "item " + std::to_string(pair.l1) + " faces away from item " +
                   std::to_string(pair.l2) + " in room " +
                   std::to_string(pair.room);
        }
      }
    }
    add("facing", pass, detail);
  }

  return report;
}

namespace {

struct RoomCells {
  int count = 0;
  int min_i = std::numeric_limits<int>::max();
  int max_i = -1;
  int min_j = std::numeric_limits<int>::max();
  int max_j = -1;
};

// Best bounding box for the room under the box-dependent objective terms,
// mirroring what any optimal solver assigns to the free box variables.
struct BoxPick {
  int li = 1, lj = 1, mi = 0, mj = 0;
  double rect_excess = 0.0;
  double aspect = 0.0;
  double bal = 0.0;
};

BoxPick pick_box(const ObjectiveWeights& w, int W, int L, const RoomCells& rc,
                 double acc_i, double acc_j, double total_area, bool use_bal) {
  const bool empty = rc.count == 0;
  const int tight_i = empty ? 1 : rc.max_i - rc.min_i + 1;
  const int tight_j = empty ? 1 : rc.max_j - rc.min_j + 1;

  // Per axis and candidate length, the best achievable centroid slack.
  auto axis_best = [&](int len, int limit, int lo_cell, int hi_cell,
                       double acc) -> double {
    int lo = empty ? 0 : std::max(0, hi_cell + 1 - len);
    int hi = empty ? limit - len : std::min(lo_cell, limit - len);
    double best = std::numeric_limits<double>::infinity();
    for (int m = lo; m <= hi; ++m) {
      best = std::min(best, std::abs(acc - total_area * (2.0 * m + len - 1)));
    }
    return best;
  };

  BoxPick pick;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int li = tight_i; li <= W; ++li) {
    for (int lj = tight_j; lj <= L; ++lj) {
      double cost = w.rect * li * lj + w.aspect * std::abs(li - lj);
      double ci = 0.0, cj = 0.0;
      if (use_bal) {
        ci = axis_best(li, W, rc.min_i, rc.max_i, acc_i);
        cj = axis_best(lj, L, rc.min_j, rc.max_j, acc_j);
        cost += w.bal * (ci + cj) / (2.0 * total_area);
      }
      if (cost < best_cost - 1e-12) {
        best_cost = cost;
        pick.li = li;
        pick.lj = lj;
        pick.rect_excess = static_cast<double>(li) * lj - rc.count;
        pick.aspect = std::abs(li - lj);
        pick.bal = use_bal ? (ci + cj) / (2.0 * total_area) : 0.0;
      }
    }
  }
  return pick;
}

}  // namespace

std::map<std::string, double> recompute_objective(const SceneGraph& sg,
                                                  const Grid& grid,
                                                  const Layout& layout,
                                                  const CoarseHint* hint) {
  const int W = grid.width();
  const int L = grid.length();
  const auto& w = sg.weights;

  std::map<int, RoomCells> rooms;
  for (const RoomSpec& room : sg.rooms) rooms[room.id];
  for (Cell c : grid.indoor_cells()) {
    int lab = layout.label(c);
    auto it = rooms.find(lab);
    if (it == rooms.end()) continue;
    RoomCells& rc = it->second;
    ++rc.count;
    rc.min_i = std::min(rc.min_i, c.i);
    rc.max_i = std::max(rc.max_i, c.i);
    rc.min_j = std::min(rc.min_j, c.j);
    rc.max_j = std::max(rc.max_j, c.j);
  }

  double rect = 0, perim = 0, area = 0, aspect = 0, rel = 0, bal = 0, priv = 0;

  for (const RoomSpec& room : sg.rooms) {
    const RoomCells& rc = rooms[room.id];

    // Doubled furniture centroid accumulators weighted by footprint.
    double acc_i = 0, acc_j = 0, total_area = 0;
    bool use_bal = false;
    if (w.bal > 0 && !room.furniture.empty()) {
      for (const Layout::Box& box : layout.furniture) {
        if (box.room != room.id) continue;
        const FurnitureSpec* spec = sg.furniture_by_id(box.room, box.id);
        double a = spec ? spec->footprint() : box.len_i * box.len_j;
        acc_i += a * (2.0 * box.origin.i + box.len_i - 1);
        acc_j += a * (2.0 * box.origin.j + box.len_j - 1);
        total_area += a;
      }
      use_bal = total_area > 0;
    }

    BoxPick pick = pick_box(w, W, L, rc, acc_i, acc_j, total_area, use_bal);
    rect += pick.rect_excess;
    aspect += pick.aspect;
    bal += pick.bal;
    area += std::abs(static_cast<double>(room.target_area_cells) - rc.count);

    // Boundary edges: void exposure plus disagreeing interior edges.
    for (Cell c : grid.indoor_cells()) {
      bool mine = layout.label(c) == room.id;
      for (Direction d : kDirections) {
        auto [di, dj] = offset(d);
        Cell nb{c.i + di, c.j + dj};
        if (!grid.indoor(nb)) {
          if (mine) perim += 1;
        } else if (d == Direction::E || d == Direction::N) {
          bool theirs = layout.label(nb) == room.id;
          if (mine != theirs) perim += 1;
        }
      }
    }
  }

  // Relative offsets between doubled centers.
  for (const RelativeOffset& spec : sg.constraints.relative_offsets) {
    const Layout::Box* b1 = nullptr;
    const Layout::Box* b2 = nullptr;
    for (const Layout::Box& box : layout.furniture) {
      if (box.room != spec.room) continue;
      if (box.id == spec.l1) b1 = &box;
      if (box.id == spec.l2) b2 = &box;
    }
    if (!b1 || !b2) continue;
    double di = (2.0 * b1->origin.i + b1->len_i - 1) -
                (2.0 * b2->origin.i + b2->len_i - 1) - 2.0 * spec.di;
    double dj = (2.0 * b1->origin.j + b1->len_j - 1) -
                (2.0 * b2->origin.j + b2->len_j - 1) - 2.0 * spec.dj;
    rel += 0.5 * (std::abs(di) + std::abs(dj));
  }

  // Privacy: mean entrance distance, normalised by the target area, must not
  // increase along the privacy order.
  if (sg.constraints.privacy_order.size() >= 2) {
    Cell e = grid.entrance();
    auto depth = [&](int room_id) {
      const RoomSpec* room = sg.room_by_id(room_id);
      double sum = 0;
      for (Cell c : grid.indoor_cells()) {
        if (layout.label(c) != room_id) continue;
        sum += std::abs(c.i - e.i) + std::abs(c.j - e.j);
      }
      return room ? sum / room->target_area_cells : 0.0;
    };
    const auto& order = sg.constraints.privacy_order;
    for (size_t r = 0; r + 1 < order.size(); ++r) {
      priv += std::max(0.0, depth(order[r + 1]) - depth(order[r]));
    }
  }

  std::map<std::string, double> out;
  out["rect"] = rect;
  out["perim"] = perim;
  out["area"] = area;
  out["aspect"] = aspect;
  out["rel"] = rel;
  out["bal"] = bal;
  out["priv"] = priv;

  double total = w.rect * rect + w.perim * perim + w.area * area +
                 w.aspect * aspect + w.rel * rel + w.bal * bal + w.priv * priv;

  if (hint) {
    double ref = 0;
    for (Cell c : grid.indoor_cells()) {
      int cc = hint->pi[static_cast<size_t>(c.j) * W + c.i];
      if (cc < 0) continue;
      int lab = hint->coarse_labels[cc];
      if (lab <= 0) continue;
      if (layout.label(c) != lab) ref += 1;
    }
    out["ref"] = ref;
    total += w.ref * ref;
  }

  out["total_weighted"] = total;
  return out;
}

}  // namespace gridplan
