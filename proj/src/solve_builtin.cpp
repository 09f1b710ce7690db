#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "builder_detail.hpp"
#include "gridplan/coarse_to_fine.hpp"
#include "gridplan/common.hpp"
#include "gridplan/solver.hpp"

namespace gridplan {

namespace {

using detail::RoomBoxChoice;
using detail::RoomGeometry;

constexpr double kHuge = std::numeric_limits<double>::infinity();
constexpr double kTie = 1e-9;

// One candidate position and orientation for an item, already checked for
// containment and the against-wall rules under the current leaf labelling.
struct Placement {
  int sigma = 0;
  int mu = 0;
  int min_i = 0;
  int min_j = 0;
  int len_i = 1;
  int len_j = 1;
  std::vector<int> covered;  // compact cell indices
};

// A joint placement of every item of one room plus its room-local cost
// (bounding box + balance + relative offsets).
struct Combo {
  std::vector<int> pick;  // placement index per item
  double cost = 0.0;
};

// Depth-first search over cell labels (corridor or one of the rooms), in
// compact cell order. Furniture is placed at the leaves, room by room;
// placements in open rooms change the traversable set and are therefore
// searched jointly, while closed rooms decouple once that set is known.
// Feasibility mirrors complete_solution: whatever it would reject, the
// search never proposes, and every accepted leaf is completed through it so
// the incumbent objective comes from the same evaluator the external path
// uses.
class LabelSearch {
 public:
  LabelSearch(const MilpModel& model, const SolveParams& params)
      : model_(model),
        ctx_(*model.context),
        grid_(ctx_.grid),
        params_(params) {}

  Solution run() {
    prepare();
    t0_ = std::chrono::steady_clock::now();
    if (!infeasible_setup_) dfs(0);

    Solution sol;
    sol.nodes = nodes_;
    sol.wall_time_s = elapsed();
    if (expired_) {
      sol.status = SolveStatus::TimeLimit;
      sol.bound = 0.0;  // every objective group is nonnegative
    } else if (have_incumbent_) {
      sol.status = SolveStatus::Optimal;
      sol.bound = incumbent_;
    } else {
      sol.status = SolveStatus::Infeasible;
      sol.bound = 0.0;
    }
    if (have_incumbent_) {
      sol.objective = incumbent_;
      for (size_t v = 0; v < model_.variables.size(); ++v) {
        double val = best_values_[v];
        sol.values[model_.variables[v].name] = std::isnan(val) ? 0.0 : val;
      }
    }
    return sol;
  }

 private:
  // ---- setup ----------------------------------------------------------

  void prepare() {
    n_ = static_cast<int>(ctx_.cells.size());
    R_ = ctx_.room_count();
    corridor_ = R_;
    entrance_ = ctx_.cell_index(grid_.entrance());
    with_furniture_ = !ctx_.coarse && model_.encoded.count("furniture") > 0;
    conn_ = model_.encoded.count("connectivity") > 0;
    acc_ = model_.encoded.count("accessibility") > 0;
    adj_ = model_.encoded.count("adjacency") > 0 &&
           !ctx_.sg.constraints.adjacency_pairs.empty();
    wall_ = model_.encoded.count("against_wall") > 0;
    af_ = model_.encoded.count("alignment_facing") > 0;

    for (const auto& g : model_.objective) {
      if (g.name == "rect") w_rect_ = g.weight;
      if (g.name == "perim") w_perim_ = g.weight;
      if (g.name == "area") w_area_ = g.weight;
      if (g.name == "aspect") w_aspect_ = g.weight;
      if (g.name == "rel") w_rel_ = g.weight;
      if (g.name == "bal") w_bal_ = g.weight;
      if (g.name == "priv") w_priv_ = g.weight;
      if (g.name == "ref") w_ref_ = g.weight;
    }
    box_w_ = ObjectiveWeights{};
    box_w_.rect = w_rect_;
    box_w_.aspect = w_aspect_;
    box_w_.bal = w_bal_;

    nbr_.assign(n_, {-1, -1, -1, -1});
    void_degree_.assign(n_, 0);
    for (int c = 0; c < n_; ++c) {
      for (int d = 0; d < 4; ++d) {
        auto nb = grid_.adj(ctx_.cells[c], kDirections[d]);
        if (nb.has_value()) {
          nbr_[c][d] = ctx_.cell_index(*nb);
        } else {
          ++void_degree_[c];
        }
      }
    }

    open_.assign(R_, 0);
    target_.assign(R_, 0);
    furnished_.assign(R_, 0);
    use_bal_.assign(R_, 0);
    needed_.assign(R_, 0);
    for (int r = 0; r < R_; ++r) {
      const auto& room = ctx_.sg.rooms[r];
      open_[r] = room.open ? 1 : 0;
      target_[r] = room.target_area_cells;
      furnished_[r] = with_furniture_ && ctx_.item_count(r) > 0;
      use_bal_[r] =
          furnished_[r] &&
          model_.var("bl_" + std::to_string(room.id) + "_i") >= 0;
      int need = 0;
      if (with_furniture_) {
        for (const auto& item : room.furniture) need += item.footprint();
      }
      if (acc_ && !room.open) need += 1;  // furniture-free door witness
      needed_[r] = need;
    }

    fixed_.assign(n_, -1);
    if (model_.encoded.count("corner")) {
      for (int r = 0; r < R_; ++r) {
        const auto& room = ctx_.sg.rooms[r];
        if (!room.corner_pref.has_value()) continue;
        Cell corner =
            corner_cell(*room.corner_pref, grid_.width(), grid_.length());
        if (!grid_.indoor(corner)) {
          infeasible_setup_ = true;
          return;
        }
        int c = ctx_.cell_index(corner);
        if (fixed_[c] >= 0 && fixed_[c] != r) {
          infeasible_setup_ = true;  // two rooms claim the same corner cell
          return;
        }
        fixed_[c] = r;
      }
    }

    pref_.assign(n_, -1);
    if (!model_.warm_start.empty()) {
      auto warm = [&](int var) {
        auto it = model_.warm_start.find(model_.variables[var].name);
        return it != model_.warm_start.end() && it->second > 0.5;
      };
      for (int c = 0; c < n_; ++c) {
        if (warm(ctx_.p[c])) pref_[c] = corridor_;
        for (int r = 0; r < R_; ++r) {
          if (warm(ctx_.x[r][c])) pref_[c] = r;
        }
      }
    }

    hinted_.assign(n_, -1);
    if (w_ref_ > 0 && ctx_.hint && !ctx_.coarse) {
      const auto& hint = *ctx_.hint;
      for (int c = 0; c < n_; ++c) {
        Cell cell = ctx_.cells[c];
        int cc = hint.pi[static_cast<size_t>(cell.j) * grid_.width() + cell.i];
        if (cc < 0) continue;
        int lab = hint.coarse_labels[cc];
        if (lab <= 0) continue;
        hinted_[c] = detail::room_index_by_id(ctx_.sg, lab);
      }
    }

    if (af_) {
      align_.assign(R_, {});
      facing_.assign(R_, {});
      for (const auto& pair : ctx_.sg.constraints.alignment_pairs) {
        int rk = detail::room_index_by_id(ctx_.sg, pair.room);
        align_[rk].emplace_back(
            detail::item_index_by_id(ctx_.sg.rooms[rk], pair.l1),
            detail::item_index_by_id(ctx_.sg.rooms[rk], pair.l2));
      }
      for (const auto& pair : ctx_.sg.constraints.facing_pairs) {
        int rk = detail::room_index_by_id(ctx_.sg, pair.room);
        facing_[rk].emplace_back(
            detail::item_index_by_id(ctx_.sg.rooms[rk], pair.l1),
            detail::item_index_by_id(ctx_.sg.rooms[rk], pair.l2));
      }
    } else {
      align_.assign(R_, {});
      facing_.assign(R_, {});
    }
    rel_.assign(R_, {});
    if (w_rel_ > 0) {
      for (const auto& rel : ctx_.sg.constraints.relative_offsets) {
        int rk = detail::room_index_by_id(ctx_.sg, rel.room);
        rel_[rk].push_back({detail::item_index_by_id(ctx_.sg.rooms[rk], rel.l1),
                            detail::item_index_by_id(ctx_.sg.rooms[rk], rel.l2),
                            rel.di, rel.dj});
      }
    }

    label_.assign(n_, -1);
    asg_.assign(R_, 0);
    bb_.assign(R_, {0, 0, 0, 0});
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0_)
        .count();
  }

  // ---- label search ---------------------------------------------------

  void dfs(int idx) {
    if (idx == n_) {
      process_leaf();
      return;
    }
    const int c = idx;  // compact order is the branching order

    // Candidate order: warm-start label, corridor, rooms by index.
    int cands[2 + 16];
    int cand_count = 0;
    auto push_cand = [&](int g) {
      for (int k = 0; k < cand_count; ++k) {
        if (cands[k] == g) return;
      }
      cands[cand_count++] = g;
    };
    std::vector<int> spill;
    if (R_ + 2 > static_cast<int>(sizeof(cands) / sizeof(int))) {
      // Larger room counts take the slow path; grids that big are rare here.
      spill.reserve(R_ + 2);
    }
    auto add = [&](int g) {
      if (spill.capacity() > 0) {
        if (std::find(spill.begin(), spill.end(), g) == spill.end())
          spill.push_back(g);
      } else {
        push_cand(g);
      }
    };
    if (pref_[c] >= 0) add(pref_[c]);
    add(corridor_);
    for (int r = 0; r < R_; ++r) add(r);
    const int* order = spill.capacity() > 0 ? spill.data() : cands;
    const int order_n =
        spill.capacity() > 0 ? static_cast<int>(spill.size()) : cand_count;

    const int rem = n_ - idx - 1;
    for (int k = 0; k < order_n; ++k) {
      const int g = order[k];
      if (fixed_[c] >= 0 && g != fixed_[c]) continue;

      ++nodes_;
      if ((nodes_ & 511) == 0 && params_.time_limit_s > 0 &&
          elapsed() > params_.time_limit_s) {
        expired_ = true;
        return;
      }

      // Settled-edge perimeter and refinement mismatch are exact partial
      // sums; everything else in the bound is a per-room relaxation.
      double dper = g != corridor_ ? void_degree_[c] : 0.0;
      for (int d = 0; d < 4; ++d) {
        int nc = nbr_[c][d];
        if (nc < 0 || label_[nc] < 0 || label_[nc] == g) continue;
        dper += (g != corridor_ && label_[nc] != corridor_) ? 2.0 : 1.0;
      }
      double dref = (hinted_[c] >= 0 && hinted_[c] != g) ? 1.0 : 0.0;

      if (conn_ && acc_ && c == entrance_ && g != corridor_ && !open_[g]) {
        // A closed room on the entrance forces the traversable set empty,
        // which contradicts that room's own door requirement.
        continue;
      }

      bool dead = false;
      double lb = w_perim_ * (perim_run_ + dper) + w_ref_ * (ref_run_ + dref);
      for (int r = 0; r < R_; ++r) {
        int a = asg_[r] + (g == r ? 1 : 0);
        if (a + rem < needed_[r]) {
          dead = true;
          break;
        }
        if (w_area_ > 0) {
          double dev = std::max(static_cast<double>(a) - target_[r],
                                static_cast<double>(target_[r]) - a - rem);
          if (dev > 0) lb += w_area_ * dev;
        }
        if (w_rect_ > 0) {
          double box_lb = 1.0;
          if (a > 0) {
            int mi = bb_[r][0], ma = bb_[r][1], mj = bb_[r][2], mb = bb_[r][3];
            if (asg_[r] == 0) {
              mi = ma = ctx_.cells[c].i;
              mj = mb = ctx_.cells[c].j;
            } else if (g == r) {
              mi = std::min(mi, ctx_.cells[c].i);
              ma = std::max(ma, ctx_.cells[c].i);
              mj = std::min(mj, ctx_.cells[c].j);
              mb = std::max(mb, ctx_.cells[c].j);
            }
            box_lb = static_cast<double>(ma - mi + 1) * (mb - mj + 1);
          }
          double slack = box_lb - a - rem;
          if (slack > 0) lb += w_rect_ * slack;
        }
      }
      if (dead) continue;
      if (have_incumbent_ && lb >= incumbent_ - kTie) continue;

      label_[c] = g;
      perim_run_ += dper;
      ref_run_ += dref;
      std::array<int, 4> saved{};
      if (g != corridor_) {
        saved = bb_[g];
        if (asg_[g] == 0) {
          bb_[g] = {ctx_.cells[c].i, ctx_.cells[c].i, ctx_.cells[c].j,
                    ctx_.cells[c].j};
        } else {
          bb_[g][0] = std::min(bb_[g][0], ctx_.cells[c].i);
          bb_[g][1] = std::max(bb_[g][1], ctx_.cells[c].i);
          bb_[g][2] = std::min(bb_[g][2], ctx_.cells[c].j);
          bb_[g][3] = std::max(bb_[g][3], ctx_.cells[c].j);
        }
        ++asg_[g];
      }

      dfs(idx + 1);

      if (g != corridor_) {
        bb_[g] = saved;
        --asg_[g];
      }
      label_[c] = -1;
      perim_run_ -= dper;
      ref_run_ -= dref;
      if (expired_) return;
    }
  }

  // ---- leaf processing ------------------------------------------------

  std::vector<RoomGeometry> room_geometries() const {
    std::vector<RoomGeometry> geo(R_);
    for (int r = 0; r < R_; ++r) {
      if (asg_[r] == 0) continue;
      geo[r].empty = false;
      geo[r].min_i = bb_[r][0];
      geo[r].max_i = bb_[r][1];
      geo[r].min_j = bb_[r][2];
      geo[r].max_j = bb_[r][3];
      geo[r].count = asg_[r];
    }
    return geo;
  }

  double privacy_cost() const {
    const auto& order = ctx_.sg.constraints.privacy_order;
    Cell e = grid_.entrance();
    auto depth = [&](int room_id) {
      int rk = detail::room_index_by_id(ctx_.sg, room_id);
      double sum = 0;
      for (int c = 0; c < n_; ++c) {
        if (label_[c] != rk) continue;
        sum += std::abs(ctx_.cells[c].i - e.i) + std::abs(ctx_.cells[c].j - e.j);
      }
      return sum / ctx_.sg.rooms[rk].target_area_cells;
    };
    double total = 0;
    for (size_t r = 0; r + 1 < order.size(); ++r) {
      total += std::max(0.0, depth(order[r + 1]) - depth(order[r]));
    }
    return total;
  }

  // Mirror of the flow certificate: an empty traversable set is fine;
  // otherwise the entrance must be traversable, every traversable cell
  // reachable from it, and one reachable cell must touch the void.
  bool traversable_feasible(const std::vector<char>& q) const {
    int total = 0;
    for (int c = 0; c < n_; ++c) total += q[c];
    if (total == 0) return true;
    if (!q[entrance_]) return false;
    std::vector<int> stack{entrance_};
    std::vector<char> seen(n_, 0);
    seen[entrance_] = 1;
    int reached = 0;
    bool dump = false;
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      ++reached;
      for (int d = 0; d < 4; ++d) {
        int nc = nbr_[c][d];
        if (nc < 0) {
          dump = true;
          continue;
        }
        if (q[nc] && !seen[nc]) {
          seen[nc] = 1;
          stack.push_back(nc);
        }
      }
    }
    return reached == total && dump;
  }

  std::vector<char> base_traversable(
      const std::vector<char>& covered) const {
    std::vector<char> q(n_, 0);
    for (int c = 0; c < n_; ++c) {
      if (label_[c] == corridor_) {
        q[c] = 1;
      } else if (label_[c] >= 0 && open_[label_[c]] && !covered[c]) {
        q[c] = 1;
      }
    }
    return q;
  }

  std::vector<Placement> item_placements(int rk, const FurnitureSpec& item,
                                         const RoomGeometry& rg) const {
    std::vector<Placement> out;
    if (rg.empty) return out;
    const bool square = item.width_cells == item.length_cells;
    const bool front_matters =
        (wall_ && item.against_wall) ||
        (af_ && std::any_of(facing_[rk].begin(), facing_[rk].end(),
                            [&](const std::pair<int, int>& p) {
                              return ctx_.sg.rooms[rk].furniture[p.first].id ==
                                     item.id;
                            }));
    const bool sigma_matters =
        !square || front_matters ||
        (af_ && std::any_of(align_[rk].begin(), align_[rk].end(),
                            [&](const std::pair<int, int>& p) {
                              const auto& items = ctx_.sg.rooms[rk].furniture;
                              return items[p.first].id == item.id ||
                                     items[p.second].id == item.id;
                            }));

    for (int sigma = 0; sigma <= (sigma_matters ? 1 : 0); ++sigma) {
      int li = detail::len_i_of(item, sigma);
      int lj = detail::len_j_of(item, sigma);
      if (li > rg.max_i - rg.min_i + 1 || lj > rg.max_j - rg.min_j + 1)
        continue;
      for (int mi = rg.min_i; mi + li - 1 <= rg.max_i; ++mi) {
        for (int mj = rg.min_j; mj + lj - 1 <= rg.max_j; ++mj) {
          std::vector<int> covered;
          covered.reserve(static_cast<size_t>(li) * lj);
          bool inside = true;
          for (int ii = mi; ii < mi + li && inside; ++ii) {
            for (int jj = mj; jj < mj + lj && inside; ++jj) {
              Cell cell{ii, jj};
              if (!grid_.indoor(cell)) {
                inside = false;
                break;
              }
              int cc = ctx_.cell_index(cell);
              if (label_[cc] != rk) {
                inside = false;
                break;
              }
              covered.push_back(cc);
            }
          }
          if (!inside) continue;

          bool touches_wall = true;
          if (wall_ && item.against_wall) {
            touches_wall = false;
            for (int cc : covered) {
              for (int d = 0; d < 4 && !touches_wall; ++d) {
                int nc = nbr_[cc][d];
                if (nc < 0 || label_[nc] != rk) touches_wall = true;
              }
              if (touches_wall) break;
            }
          }
          if (!touches_wall) continue;

          for (int mu = 0; mu <= (front_matters ? 1 : 0); ++mu) {
            if (wall_ && item.against_wall) {
              auto [nu_i, nu_j] = detail::nu_of(sigma, mu);
              bool faces_room = true;
              for (int cc : covered) {
                Cell front{ctx_.cells[cc].i + nu_i, ctx_.cells[cc].j + nu_j};
                if (!grid_.indoor(front) ||
                    label_[ctx_.cell_index(front)] != rk) {
                  faces_room = false;
                  break;
                }
              }
              if (!faces_room) continue;
            }
            Placement pl;
            pl.sigma = sigma;
            pl.mu = mu;
            pl.min_i = mi;
            pl.min_j = mj;
            pl.len_i = li;
            pl.len_j = lj;
            pl.covered = covered;
            out.push_back(std::move(pl));
          }
        }
      }
    }
    return out;
  }

  // Enumerates joint placements for one room, applying the in-room pair
  // rules, and returns them sorted by cost.
  bool room_combos(int rk, const RoomGeometry& rg,
                   std::vector<std::vector<Placement>>* plc,
                   std::vector<Combo>* out) const {
    const auto& room = ctx_.sg.rooms[rk];
    const int K = ctx_.item_count(rk);
    plc->clear();
    plc->reserve(K);
    for (int l = 0; l < K; ++l) {
      plc->push_back(item_placements(rk, room.furniture[l], rg));
      if (plc->back().empty()) return false;
    }

    std::vector<int> pick(K, -1);
    std::vector<char> used(n_, 0);
    out->clear();

    auto emit = [&]() {
      for (const auto& [a, b] : align_[rk]) {
        if ((*plc)[a][pick[a]].sigma != (*plc)[b][pick[b]].sigma) return;
      }
      for (const auto& [a, b] : facing_[rk]) {
        const Placement& p1 = (*plc)[a][pick[a]];
        const Placement& p2 = (*plc)[b][pick[b]];
        auto [nu_i, nu_j] = detail::nu_of(p1.sigma, p1.mu);
        if (nu_i * (p2.min_i - p1.min_i) + nu_j * (p2.min_j - p1.min_j) < 0)
          return;
      }
      double cost = 0, acc_i = 0, acc_j = 0, total_area = 0;
      if (use_bal_[rk]) {
        for (int l = 0; l < K; ++l) {
          const Placement& pl = (*plc)[l][pick[l]];
          double a = room.furniture[l].footprint();
          acc_i += a * (2.0 * pl.min_i + pl.len_i - 1);
          acc_j += a * (2.0 * pl.min_j + pl.len_j - 1);
          total_area += a;
        }
      }
      RoomBoxChoice box = detail::best_room_box(
          box_w_, grid_.width(), grid_.length(), rg, acc_i, acc_j, total_area,
          use_bal_[rk] != 0);
      cost += box.cost;
      for (const auto& rel : rel_[rk]) {
        const Placement& p1 = (*plc)[rel.l1][pick[rel.l1]];
        const Placement& p2 = (*plc)[rel.l2][pick[rel.l2]];
        double di = (2.0 * p1.min_i + p1.len_i - 1) -
                    (2.0 * p2.min_i + p2.len_i - 1) - 2.0 * rel.di;
        double dj = (2.0 * p1.min_j + p1.len_j - 1) -
                    (2.0 * p2.min_j + p2.len_j - 1) - 2.0 * rel.dj;
        cost += w_rel_ * 0.5 * (std::abs(di) + std::abs(dj));
      }
      out->push_back(Combo{pick, cost});
    };

    // Product over items with an occupancy scratch for disjointness.
    auto recurse = [&](auto&& self, int l) -> void {
      if (l == K) {
        emit();
        return;
      }
      for (size_t pi = 0; pi < (*plc)[l].size(); ++pi) {
        const Placement& pl = (*plc)[l][pi];
        bool clash = false;
        for (int cc : pl.covered) {
          if (used[cc]) {
            clash = true;
            break;
          }
        }
        if (clash) continue;
        for (int cc : pl.covered) used[cc] = 1;
        pick[l] = static_cast<int>(pi);
        self(self, l + 1);
        pick[l] = -1;
        for (int cc : pl.covered) used[cc] = 0;
      }
    };
    recurse(recurse, 0);

    std::stable_sort(out->begin(), out->end(),
                     [](const Combo& a, const Combo& b) { return a.cost < b.cost; });
    return !out->empty();
  }

  bool door_witness(int rk, const std::vector<char>& q,
                    const std::vector<char>& occupied) const {
    for (int c = 0; c < n_; ++c) {
      if (label_[c] != rk || occupied[c]) continue;
      for (int d = 0; d < 4; ++d) {
        int nc = nbr_[c][d];
        if (nc >= 0 && q[nc]) return true;
      }
    }
    return false;
  }

  void process_leaf() {
    double cost = w_perim_ * perim_run_ + w_ref_ * ref_run_;
    for (int r = 0; r < R_; ++r) {
      if (w_area_ > 0)
        cost += w_area_ * std::abs(asg_[r] - static_cast<double>(target_[r]));
      if (w_rect_ > 0) cost -= w_rect_ * asg_[r];
    }
    if (w_priv_ > 0) cost += privacy_cost();
    if (have_incumbent_ && cost >= incumbent_ - kTie) return;

    if (adj_) {
      for (const auto& pair : ctx_.sg.constraints.adjacency_pairs) {
        int rk = detail::room_index_by_id(ctx_.sg, pair.k);
        int rm = detail::room_index_by_id(ctx_.sg, pair.m);
        bool found = false;
        for (int c = 0; c < n_ && !found; ++c) {
          if (label_[c] != rk) continue;
          for (int d = 0; d < 4; ++d) {
            int nc = nbr_[c][d];
            if (nc >= 0 && label_[nc] == rm) {
              found = true;
              break;
            }
          }
        }
        if (!found) return;
      }
    }

    std::vector<RoomGeometry> geo = room_geometries();
    for (int r = 0; r < R_; ++r) {
      if (furnished_[r]) continue;
      cost += detail::best_room_box(box_w_, grid_.width(), grid_.length(),
                                    geo[r], 0, 0, 0, false)
                  .cost;
    }
    if (have_incumbent_ && cost >= incumbent_ - kTie) return;

    std::vector<char> no_cover(n_, 0);
    bool any_furnished = false;
    for (int r = 0; r < R_; ++r) any_furnished |= furnished_[r] != 0;

    if (!any_furnished) {
      std::vector<char> q = base_traversable(no_cover);
      if (conn_ && !traversable_feasible(q)) return;
      if (acc_) {
        for (int r = 0; r < R_; ++r) {
          if (!open_[r] && !door_witness(r, q, no_cover)) return;
        }
      }
      accept_leaf(nullptr, nullptr);
      return;
    }

    // Joint placements per furnished room.
    std::vector<std::vector<std::vector<Placement>>> plc(R_);
    std::vector<std::vector<Combo>> combos(R_);
    double min_sum = 0;
    for (int r = 0; r < R_; ++r) {
      if (!furnished_[r]) continue;
      if (!room_combos(r, geo[r], &plc[r], &combos[r])) return;
      min_sum += combos[r].front().cost;
    }
    if (have_incumbent_ && cost + min_sum >= incumbent_ - kTie) return;

    std::vector<int> open_rooms, closed_rooms;
    for (int r = 0; r < R_; ++r) {
      if (furnished_[r] && open_[r]) open_rooms.push_back(r);
      if (!open_[r]) closed_rooms.push_back(r);
    }
    double closed_furnished_min = 0;
    for (int r : closed_rooms) {
      if (furnished_[r]) closed_furnished_min += combos[r].front().cost;
    }
    std::vector<double> open_rest(open_rooms.size() + 1, 0.0);
    for (int k = static_cast<int>(open_rooms.size()) - 1; k >= 0; --k) {
      open_rest[k] = open_rest[k + 1] + combos[open_rooms[k]].front().cost;
    }

    double best_furn = kHuge;
    std::vector<int> best_open_pick(open_rooms.size(), -1);
    std::vector<int> best_closed_combo(R_, -1);
    std::vector<int> open_pick(open_rooms.size(), -1);
    std::vector<char> covered(n_, 0);
    std::vector<char> occupied(n_, 0);

    auto closed_total = [&](const std::vector<char>& q,
                            std::vector<int>* chosen) -> double {
      double sum = 0;
      for (int r : closed_rooms) {
        if (furnished_[r]) {
          int found = -1;
          for (size_t ci = 0; ci < combos[r].size(); ++ci) {
            if (acc_) {
              std::fill(occupied.begin(), occupied.end(), 0);
              const Combo& cb = combos[r][ci];
              for (int l = 0; l < ctx_.item_count(r); ++l) {
                for (int cc : plc[r][l][cb.pick[l]].covered) occupied[cc] = 1;
              }
              if (!door_witness(r, q, occupied)) continue;
            }
            found = static_cast<int>(ci);
            break;
          }
          if (found < 0) return kHuge;
          (*chosen)[r] = found;
          sum += combos[r][found].cost;
        } else if (acc_) {
          if (!door_witness(r, q, no_cover)) return kHuge;
        }
      }
      return sum;
    };

    std::vector<int> chosen_closed(R_, -1);
    auto explore = [&](auto&& self, int oi, double acc_cost) -> void {
      double limit = best_furn;
      if (have_incumbent_) limit = std::min(limit, incumbent_ - cost);
      if (acc_cost + open_rest[oi] + closed_furnished_min >= limit - kTie)
        return;
      if (oi == static_cast<int>(open_rooms.size())) {
        std::vector<char> q = base_traversable(covered);
        if (conn_ && !traversable_feasible(q)) return;
        std::fill(chosen_closed.begin(), chosen_closed.end(), -1);
        double closed_cost = closed_total(q, &chosen_closed);
        if (closed_cost == kHuge) return;
        double total = acc_cost + closed_cost;
        if (total < best_furn - kTie) {
          best_furn = total;
          best_open_pick = open_pick;
          best_closed_combo = chosen_closed;
        }
        return;
      }
      int r = open_rooms[oi];
      for (size_t ci = 0; ci < combos[r].size(); ++ci) {
        const Combo& cb = combos[r][ci];
        for (int l = 0; l < ctx_.item_count(r); ++l) {
          for (int cc : plc[r][l][cb.pick[l]].covered) covered[cc] = 1;
        }
        open_pick[oi] = static_cast<int>(ci);
        self(self, oi + 1, acc_cost + cb.cost);
        open_pick[oi] = -1;
        for (int l = 0; l < ctx_.item_count(r); ++l) {
          for (int cc : plc[r][l][cb.pick[l]].covered) covered[cc] = 0;
        }
      }
    };
    explore(explore, 0, 0.0);

    if (best_furn == kHuge) return;
    if (have_incumbent_ && cost + best_furn >= incumbent_ - kTie) return;

    // Resolve the chosen combo per furnished room for assembly.
    std::vector<const Combo*> chosen(R_, nullptr);
    for (size_t oi = 0; oi < open_rooms.size(); ++oi) {
      chosen[open_rooms[oi]] = &combos[open_rooms[oi]][best_open_pick[oi]];
    }
    for (int r : closed_rooms) {
      if (furnished_[r]) chosen[r] = &combos[r][best_closed_combo[r]];
    }
    accept_leaf(&plc, &chosen);
  }

  void accept_leaf(const std::vector<std::vector<std::vector<Placement>>>* plc,
                   const std::vector<const Combo*>* chosen) {
    std::vector<double> values(model_.variables.size(),
                               std::numeric_limits<double>::quiet_NaN());
    for (int c = 0; c < n_; ++c) {
      values[ctx_.p[c]] = label_[c] == corridor_ ? 1.0 : 0.0;
      for (int r = 0; r < R_; ++r) {
        values[ctx_.x[r][c]] = label_[c] == r ? 1.0 : 0.0;
      }
    }
    if (with_furniture_) {
      for (int r = 0; r < R_; ++r) {
        if (!furnished_[r]) continue;
        const Combo& cb = *(*chosen)[r];
        for (int l = 0; l < ctx_.item_count(r); ++l) {
          const Placement& pl = (*plc)[r][l][cb.pick[l]];
          values[ctx_.sigma[r][l]] = pl.sigma;
          values[ctx_.mu[r][l]] = pl.mu;
          for (int c = 0; c < n_; ++c) values[ctx_.f[r][l][c]] = 0.0;
          for (int cc : pl.covered) values[ctx_.f[r][l][cc]] = 1.0;
        }
      }
    } else if (!ctx_.coarse) {
      // Furniture variables exist but carry no rows; pin them so imported
      // witness rows (e.g. door cells must be furniture-free) stay defined.
      for (int r = 0; r < R_; ++r) {
        for (int l = 0; l < ctx_.item_count(r); ++l) {
          values[ctx_.sigma[r][l]] = 0.0;
          values[ctx_.mu[r][l]] = 0.0;
          values[ctx_.xi_min_i[r][l]] = 0.0;
          values[ctx_.xi_min_j[r][l]] = 0.0;
          for (int c = 0; c < n_; ++c) values[ctx_.f[r][l][c]] = 0.0;
        }
      }
    }

    if (!complete_solution(model_, values)) return;
    double val = model_.eval_objective(values);
    if (!have_incumbent_ || val < incumbent_ - kTie) {
      incumbent_ = val;
      best_values_ = std::move(values);
      have_incumbent_ = true;
    }
  }

  // ---- members --------------------------------------------------------

  struct RelSpec {
    int l1 = 0, l2 = 0;
    int di = 0, dj = 0;
  };

  const MilpModel& model_;
  const BuildContext& ctx_;
  const Grid& grid_;
  SolveParams params_;

  int n_ = 0;
  int R_ = 0;
  int corridor_ = 0;
  int entrance_ = 0;
  bool with_furniture_ = false;
  bool conn_ = false, acc_ = false, adj_ = false, wall_ = false, af_ = false;
  double w_rect_ = 0, w_perim_ = 0, w_area_ = 0, w_aspect_ = 0, w_rel_ = 0,
         w_bal_ = 0, w_priv_ = 0, w_ref_ = 0;
  ObjectiveWeights box_w_;

  std::vector<std::array<int, 4>> nbr_;
  std::vector<int> void_degree_;
  std::vector<int> fixed_;
  std::vector<int> pref_;
  std::vector<int> hinted_;
  std::vector<int> needed_;
  std::vector<char> open_;
  std::vector<int> target_;
  std::vector<char> furnished_;
  std::vector<char> use_bal_;
  std::vector<std::vector<std::pair<int, int>>> align_, facing_;
  std::vector<std::vector<RelSpec>> rel_;

  std::vector<int> label_;
  std::vector<int> asg_;
  std::vector<std::array<int, 4>> bb_;  // min_i, max_i, min_j, max_j
  double perim_run_ = 0.0;
  double ref_run_ = 0.0;

  double incumbent_ = kHuge;
  bool have_incumbent_ = false;
  std::vector<double> best_values_;
  long long nodes_ = 0;
  bool expired_ = false;
  bool infeasible_setup_ = false;
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace

Solution solve_builtin(const MilpModel& model, const SolveParams& params) {
  if (!model.context) {
    throw InvalidModel("solve_builtin requires a model with its build context");
  }
  if (model.metadata.binary_count > params.binary_budget) {
    throw BudgetExceeded("model has " +
                         std::to_string(model.metadata.binary_count) +
                         " binaries, over the budget of " +
                         std::to_string(params.binary_budget));
  }
  LabelSearch search(model, params);
  return search.run();
}

}  // namespace gridplan
