#include "b2v/space_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include "json.hpp"

#include "b2v/error.hpp"
#include "b2v/text.hpp"

namespace b2v {

namespace {

constexpr double kEps = 1e-9;

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool on_segment(Point a, Point b, Point p) {
  if (std::abs(cross(a, b, p)) > kEps * std::max(1.0, std::hypot(b.x - a.x, b.y - a.y))) {
    return false;
  }
  return p.x >= std::min(a.x, b.x) - kEps && p.x <= std::max(a.x, b.x) + kEps &&
         p.y >= std::min(a.y, b.y) - kEps && p.y <= std::max(a.y, b.y) + kEps;
}

int orientation(Point a, Point b, Point c) {
  const double v = cross(a, b, c);
  if (std::abs(v) <= kEps) return 0;
  return v > 0 ? 1 : -1;
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && on_segment(p1, p2, q1)) || (o2 == 0 && on_segment(p1, p2, q2)) ||
         (o3 == 0 && on_segment(q1, q2, p1)) || (o4 == 0 && on_segment(q1, q2, p2));
}

// Candidate indices for a coordinate measured in cells from the origin: a value
// sitting exactly on a border yields both neighbors, lower first.
std::vector<std::int64_t> border_candidates(double u) {
  const double nearest = std::round(u);
  if (std::abs(u - nearest) <= kEps) {
    const auto k = static_cast<std::int64_t>(nearest);
    return {k - 1, k};
  }
  return {static_cast<std::int64_t>(std::floor(u))};
}

}  // namespace

double signed_area(const std::vector<Point>& polygon) {
  double twice = 0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % polygon.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return twice / 2;
}

bool point_in_polygon(const std::vector<Point>& polygon, Point p) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = polygon[i];
    const auto& b = polygon[j];
    if (on_segment(a, b, p)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_at = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

bool is_simple_polygon(const std::vector<Point>& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a1 = polygon[i];
    const Point a2 = polygon[(i + 1) % n];
    if (std::hypot(a2.x - a1.x, a2.y - a1.y) <= kEps) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point b1 = polygon[j];
      const Point b2 = polygon[(j + 1) % n];
      const bool next = j == i + 1;
      const bool wrap = i == 0 && j == n - 1;
      if (next || wrap) {
        // Neighbors share one vertex; they may only overlap if they fold back.
        const Point shared = next ? a2 : a1;
        const Point far_a = next ? a1 : a2;
        const Point far_b = next ? b2 : b1;
        if (orientation(far_a, shared, far_b) == 0) {
          const double dot = (far_a.x - shared.x) * (far_b.x - shared.x) +
                             (far_a.y - shared.y) * (far_b.y - shared.y);
          if (dot > 0) return false;
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

const GridCell* DiscretizedSpace::at(std::uint32_t row, std::uint32_t col) const {
  if (row >= rows || col >= cols) return nullptr;
  const auto idx = lookup_[static_cast<std::size_t>(row) * cols + col];
  return idx < 0 ? nullptr : &cells[static_cast<std::size_t>(idx)];
}

DiscretizedSpace discretize(const Footprint& footprint, double cell_size, Adjacency adjacency) {
  if (!(cell_size > 0) || !std::isfinite(cell_size)) {
    throw Error(Errc::InvalidArgument, "cell size must be positive");
  }
  const auto& poly = footprint.polygon;
  if (poly.size() < 3) throw Error(Errc::InvalidPolygon, "footprint needs at least 3 vertices");
  const double area = signed_area(poly);
  if (!(area > 0)) {
    throw Error(Errc::InvalidPolygon,
                "footprint of " + footprint.space_node.str() + " is not counter-clockwise");
  }
  if (!is_simple_polygon(poly)) {
    throw Error(Errc::InvalidPolygon,
                "footprint of " + footprint.space_node.str() + " self-intersects");
  }
  if (footprint.space_node.kind() != NodeKind::Ifc) {
    throw Error(Errc::InvalidArgument, "footprints belong to IFC space nodes");
  }

  DiscretizedSpace out;
  out.footprint = footprint;
  out.cell_size = cell_size;
  out.adjacency_mode = adjacency;
  out.degenerate = area < cell_size * cell_size;

  double min_x = poly[0].x, min_y = poly[0].y, max_x = poly[0].x, max_y = poly[0].y;
  for (const auto& p : poly) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  out.origin = {min_x, min_y};
  const auto span = [&](double extent) {
    const double n = std::ceil(extent / cell_size - kEps);
    return std::max(1.0, n);
  };
  const double cols = span(max_x - min_x);
  const double rows = span(max_y - min_y);
  if (cols > 0xFFFF || rows > 0xFFFF) {
    throw Error(Errc::InvalidArgument, "grid exceeds 65535 cells per axis; raise the cell size");
  }
  out.cols = static_cast<std::uint32_t>(cols);
  out.rows = static_cast<std::uint32_t>(rows);
  out.lookup_.assign(static_cast<std::size_t>(out.rows) * out.cols, -1);

  const auto space_key = static_cast<std::int64_t>(footprint.space_node.key());
  for (std::uint32_t r = 0; r < out.rows; ++r) {
    for (std::uint32_t c = 0; c < out.cols; ++c) {
      const Point center{min_x + (c + 0.5) * cell_size, min_y + (r + 0.5) * cell_size};
      if (!point_in_polygon(poly, center)) continue;
      out.lookup_[static_cast<std::size_t>(r) * out.cols + c] =
          static_cast<std::int32_t>(out.cells.size());
      out.cells.push_back(GridCell{NodeId::cell(space_key, r, c), footprint.space_node, r, c, center});
    }
  }

  for (const auto& cell : out.cells) {
    const auto link = [&](std::int64_t dr, std::int64_t dc) {
      const auto r = static_cast<std::int64_t>(cell.row) + dr;
      const auto c = static_cast<std::int64_t>(cell.col) + dc;
      if (r < 0 || c < 0) return;
      if (const auto* other = out.at(static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c))) {
        out.adjacency.emplace_back(std::min(cell.id, other->id), std::max(cell.id, other->id));
      }
    };
    link(0, 1);
    link(1, 0);
    if (adjacency == Adjacency::Queen) {
      link(1, 1);
      link(1, -1);
    }
  }
  return out;
}

const GridCell* locate_cell(const DiscretizedSpace& space, Point p) {
  const double u = (p.x - space.origin.x) / space.cell_size;
  const double v = (p.y - space.origin.y) / space.cell_size;
  for (auto r : border_candidates(v)) {
    for (auto c : border_candidates(u)) {
      if (r < 0 || c < 0 || r > std::numeric_limits<std::uint32_t>::max() ||
          c > std::numeric_limits<std::uint32_t>::max()) {
        continue;
      }
      if (const auto* cell = space.at(static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c))) {
        return cell;
      }
    }
  }
  return nullptr;
}

std::vector<const GridCell*> cells_near(const DiscretizedSpace& space, Point p, double radius) {
  std::vector<const GridCell*> out;
  const auto* home = locate_cell(space, p);
  for (const auto& cell : space.cells) {
    const double d = std::hypot(cell.center.x - p.x, cell.center.y - p.y);
    if (&cell == home || d <= radius + kEps) out.push_back(&cell);
  }
  return out;
}

void merge_space(PropertyGraph& graph, const DiscretizedSpace& space) {
  const auto& sid = space.footprint.space_node;
  for (const auto& cell : space.cells) {
    graph.add_node(cell.id, std::string(kLabelCell),
                   {{"space", static_cast<std::int64_t>(sid.key())},
                    {"row", static_cast<std::int64_t>(cell.row)},
                    {"col", static_cast<std::int64_t>(cell.col)},
                    {"x", cell.center.x},
                    {"y", cell.center.y}});
  }
  for (const auto& [a, b] : space.adjacency) graph.add_edge(a, b, std::string(kEdgeAdjacent), 1.0);

  if (auto* node = graph.find(sid)) {
    std::vector<double> flat;
    for (const auto& p : space.footprint.polygon) {
      flat.push_back(p.x);
      flat.push_back(p.y);
    }
    node->attributes["footprint"] = std::move(flat);
    node->attributes["elevation"] = space.footprint.elevation;
    node->attributes["cell_size"] = space.cell_size;
    node->attributes["grid_queen"] = space.adjacency_mode == Adjacency::Queen;
    for (const auto& cell : space.cells) graph.add_edge(sid, cell.id, std::string(kEdgePartOf), 1.0);
  }
}

std::size_t attach_fixed_node(PropertyGraph& graph, const DiscretizedSpace& space, NodeId node,
                              Point position, double radius, bool strict,
                              Diagnostics* diagnostics) {
  if (!graph.contains(node)) throw Error(Errc::UnknownNode, "no node " + node.str());
  const auto cells = cells_near(space, position, radius);
  if (cells.empty()) {
    const std::string msg = node.str() + " at (" + format_double(position.x) + ", " +
                            format_double(position.y) + ") has no cell of " +
                            space.footprint.space_node.str() + " within " +
                            format_double(radius) + " m";
    if (strict) throw Error(Errc::NoCellInRange, msg);
    if (diagnostics) diagnostics->add(msg);
    return 0;
  }
  for (const auto* cell : cells) graph.add_edge(node, cell->id, std::string(kEdgeAt), 1.0);
  return cells.size();
}

std::vector<DiscretizedSpace> spaces_from_graph(const PropertyGraph& graph) {
  std::vector<DiscretizedSpace> out;
  for (const auto& [id, node] : graph.nodes()) {
    auto fp = node.attributes.find("footprint");
    auto size = node.attributes.find("cell_size");
    if (fp == node.attributes.end() || size == node.attributes.end()) continue;
    const auto* flat = std::get_if<std::vector<double>>(&fp->second);
    const auto* cell_size = std::get_if<double>(&size->second);
    if (!flat || !cell_size || flat->size() % 2 != 0) {
      throw Error(Errc::FormatError, "bad grid attributes on " + id.str());
    }
    Footprint f;
    f.space_node = id;
    for (std::size_t i = 0; i < flat->size(); i += 2) f.polygon.push_back({(*flat)[i], (*flat)[i + 1]});
    if (auto el = node.attributes.find("elevation"); el != node.attributes.end()) {
      if (const auto* e = std::get_if<double>(&el->second)) f.elevation = *e;
    }
    bool queen = false;
    if (auto q = node.attributes.find("grid_queen"); q != node.attributes.end()) {
      if (const auto* b = std::get_if<bool>(&q->second)) queen = *b;
    }
    out.push_back(discretize(f, *cell_size, queen ? Adjacency::Queen : Adjacency::Rook));
  }
  return out;
}

std::vector<FootprintRecord> parse_footprints(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw Error(Errc::FormatError, std::string("footprint file: ") + ex.what());
  }
  if (!doc.is_array()) throw Error(Errc::FormatError, "footprint file must hold a JSON array");
  std::vector<FootprintRecord> out;
  try {
    for (const auto& entry : doc) {
      FootprintRecord rec;
      rec.footprint.space_node = NodeId::ifc(entry.at("space_id").get<std::int64_t>());
      for (const auto& xy : entry.at("polygon")) {
        if (!xy.is_array() || xy.size() != 2) {
          throw Error(Errc::FormatError, "polygon vertices are [x, y] pairs");
        }
        rec.footprint.polygon.push_back({xy[0].get<double>(), xy[1].get<double>()});
      }
      rec.footprint.elevation = entry.value("elevation", 0.0);
      if (signed_area(rec.footprint.polygon) < 0) {
        std::reverse(rec.footprint.polygon.begin(), rec.footprint.polygon.end());
      }
      if (entry.contains("anchors")) {
        for (const auto& a : entry.at("anchors")) {
          rec.anchors.push_back(
              {a.at("entity_id").get<std::int64_t>(), {a.at("x").get<double>(), a.at("y").get<double>()}});
        }
      }
      out.push_back(std::move(rec));
    }
  } catch (const json::exception& ex) {
    throw Error(Errc::FormatError, std::string("footprint file: ") + ex.what());
  }
  return out;
}

std::vector<FootprintRecord> read_footprints(const std::filesystem::path& path) {
  return parse_footprints(read_file(path));
}

}  // namespace b2v
