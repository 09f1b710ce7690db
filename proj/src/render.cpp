#include "gridplan/render.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "gridplan/common.hpp"
#include "gridplan/grid.hpp"

namespace gridplan {

std::string room_color(const std::string& name) {
  uint64_t h = fnv1a64(name);
  int hue = static_cast<int>(h % 360);
  int light = 74 + static_cast<int>((h >> 17) % 10);
  return "hsl(" + std::to_string(hue) + ",52%," + std::to_string(light) + "%)";
}

namespace {

struct Pt {
  double x = 0;
  double y = 0;
};

// Grid j grows northward, SVG y grows downward, so row j sits at length-1-j.
struct Frame {
  int length;
  int px;

  Pt cell_origin(Cell c) const {
    return {double(c.i) * px, double(length - 1 - c.j) * px};
  }
  // Edge endpoints, smaller corner first (left end for horizontal edges, top
  // end for vertical ones).
  std::pair<Pt, Pt> edge_ends(const EdgeRef& e) const {
    Pt o = cell_origin(e.cell);
    switch (e.dir) {
      case Direction::E:
        return {{o.x + px, o.y}, {o.x + px, o.y + px}};
      case Direction::W:
        return {{o.x, o.y}, {o.x, o.y + px}};
      case Direction::N:
        return {{o.x, o.y}, {o.x + px, o.y}};
      case Direction::S:
        return {{o.x, o.y + px}, {o.x + px, o.y + px}};
    }
    return {o, o};
  }
};

std::string num(double v) { return format_number(v); }

void line(std::ostringstream& out, Pt a, Pt b, const std::string& stroke,
          double width, const char* extra = "") {
  out << "<line x1=\"" << num(a.x) << "\" y1=\"" << num(a.y) << "\" x2=\""
      << num(b.x) << "\" y2=\"" << num(b.y) << "\" stroke=\"" << stroke
      << "\" stroke-width=\"" << num(width) << "\"" << extra << "/>\n";
}

void rect(std::ostringstream& out, Pt o, double w, double h,
          const std::string& fill, const std::string& extra = "") {
  out << "<rect x=\"" << num(o.x) << "\" y=\"" << num(o.y) << "\" width=\""
      << num(w) << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\""
      << extra << "/>\n";
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Quarter-circle door sweep: the leaf hinges on one edge endpoint and swings
// from the wall into the owning space.
void door_sector(std::ostringstream& out, const Frame& fr, const Door& door,
                 const Layout& layout, double stroke_w) {
  auto [a, b] = fr.edge_ends(door.edge);

  // Unit normal pointing into the cell the door belongs to (the labeled room,
  // or the entrance cell itself for the entrance door).
  bool into_edge_cell = true;
  if (door.kind == "room" && layout.label(door.edge.cell) != door.room) {
    into_edge_cell = false;
  }
  double nx = 0, ny = 0;
  bool vertical = a.x == b.x;
  Pt o = fr.cell_origin(door.edge.cell);
  if (vertical) {
    nx = (a.x == o.x) ? 1 : -1;  // W edge faces the cell to its east
    if (!into_edge_cell) nx = -nx;
  } else {
    ny = (a.y == o.y) ? 1 : -1;  // N edge: cell lies below in SVG coords
    if (!into_edge_cell) ny = -ny;
  }

  Pt hinge = a;
  Pt free = b;
  double r = fr.px;
  Pt swung{hinge.x + nx * r, hinge.y + ny * r};
  double cross = (free.x - hinge.x) * (swung.y - hinge.y) -
                 (free.y - hinge.y) * (swung.x - hinge.x);
  int sweep = cross > 0 ? 1 : 0;
  out << "<path d=\"M " << num(hinge.x) << " " << num(hinge.y) << " L "
      << num(free.x) << " " << num(free.y) << " A " << num(r) << " " << num(r)
      << " 0 0 " << sweep << " " << num(swung.x) << " " << num(swung.y)
      << " Z\" fill=\"white\" stroke=\"#444444\" stroke-width=\""
      << num(stroke_w) << "\"/>\n";
}

}  // namespace

std::string render_svg(const SceneGraph& sg, const Layout& layout,
                       const RenderStyle& style) {
  const int px = std::max(4, style.cell_px);
  const int W = layout.width;
  const int L = layout.length;
  Frame fr{L, px};

  const int legend_row = px + px / 2;
  int legend_h = 0;
  if (style.legend) legend_h = legend_row * (static_cast<int>(sg.rooms.size()) + 1);
  const int view_w = W * px;
  const int view_h = L * px + legend_h;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << view_w
      << " " << view_h << "\" width=\"" << view_w << "\" height=\"" << view_h
      << "\">\n";

  bool any_outdoor = false;
  for (int at = 0; at < W * L; ++at) {
    if (layout.labels[static_cast<size_t>(at)] == Layout::kOutside) {
      any_outdoor = true;
      break;
    }
  }
  if (any_outdoor && style.hatch_outdoor) {
    out << "<defs>\n"
        << "<pattern id=\"hatch\" width=\"8\" height=\"8\" "
           "patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">\n"
        << "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#b8b8b8\" "
           "stroke-width=\"1.5\"/>\n"
        << "</pattern>\n</defs>\n";
  }

  rect(out, {0, 0}, view_w, view_h, "white");

  // Cells, bottom layer.
  for (int j = L - 1; j >= 0; --j) {
    for (int i = 0; i < W; ++i) {
      Cell c{i, j};
      int lab = layout.label(c);
      Pt o = fr.cell_origin(c);
      if (lab == Layout::kOutside) {
        if (style.hatch_outdoor) rect(out, o, px, px, "url(#hatch)");
        continue;
      }
      std::string fill = "#efece4";  // corridor and open areas share a tone
      if (lab > 0) {
        const RoomSpec* room = sg.room_by_id(lab);
        fill = room_color(room ? room->name : std::to_string(lab));
      }
      rect(out, o, px, px, fill);
    }
  }

  // Furniture above cells, below walls.
  for (const Layout::Box& box : layout.furniture) {
    Pt top_left = fr.cell_origin(Cell{box.origin.i, box.origin.j + box.len_j - 1});
    double w = double(box.len_i) * px;
    double h = double(box.len_j) * px;
    double inset = px * 0.12;
    rect(out, {top_left.x + inset, top_left.y + inset}, w - 2 * inset,
         h - 2 * inset, "#fdfdfb",
         " stroke=\"#555555\" stroke-width=\"" + num(style.thin_stroke) + "\"");
    // Facing tick: center toward the middle of the nu-side face.
    Pt center{top_left.x + w / 2, top_left.y + h / 2};
    Pt tip{center.x + box.nu_i * (w / 2 - inset),
           center.y - box.nu_j * (h / 2 - inset)};
    line(out, center, tip, "#555555", style.thin_stroke);
  }

  const FloorplanArtifacts* art =
      layout.artifacts.has_value() ? &*layout.artifacts : nullptr;

  if (art) {
    for (const WallSegment& wall : art->walls) {
      auto [a, b] = fr.edge_ends(wall.edge);
      line(out, a, b, "#111111", style.wall_stroke,
           " stroke-linecap=\"square\"");
    }
    for (const Door& door : art->doors) {
      door_sector(out, fr, door, layout, style.thin_stroke);
    }
    for (const Window& window : art->windows) {
      auto [a, b] = fr.edge_ends(window.edge);
      // Shrink a touch so the wall stays visible at both ends.
      double fx = (b.x - a.x) * 0.12, fy = (b.y - a.y) * 0.12;
      line(out, {a.x + fx, a.y + fy}, {b.x - fx, b.y - fy}, "white",
           style.wall_stroke * 0.6);
    }
  }

  if (style.legend) {
    double y = L * px + legend_row * 0.5;
    for (const RoomSpec& room : sg.rooms) {
      rect(out, {double(px) * 0.25, y}, px * 0.75, px * 0.75,
           room_color(room.name),
           " stroke=\"#555555\" stroke-width=\"1\"");
      out << "<text x=\"" << num(px * 1.25) << "\" y=\""
          << num(y + px * 0.6) << "\" font-family=\"sans-serif\" font-size=\""
          << num(px * 0.6) << "\" fill=\"#333333\">" << escape_xml(room.name)
          << (room.open ? " (open)" : "") << "</text>\n";
      y += legend_row;
    }
  }

  out << "</svg>\n";
  return out.str();
}

}  // namespace gridplan
