#pragma once

// Discretizes 2D space footprints into structured square cells and wires the
// cells into a PropertyGraph.
//
// The grid is anchored at the footprint's bounding-box minimum corner. A cell
// is kept when its center lies inside the polygon or on its boundary.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "b2v/diagnostics.hpp"
#include "b2v/graph.hpp"

namespace b2v {

struct Point {
  double x = 0;
  double y = 0;
  bool operator==(const Point&) const = default;
};

struct Footprint {
  NodeId space_node;
  std::vector<Point> polygon;  // simple, counter-clockwise, meters
  double elevation = 0;
};

enum class Adjacency { Rook, Queen };

struct GridCell {
  NodeId id;
  NodeId space_node;
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  Point center;
};

struct DiscretizedSpace {
  Footprint footprint;
  double cell_size = 1.0;
  Adjacency adjacency_mode = Adjacency::Rook;
  Point origin;  // bounding-box minimum corner
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<GridCell> cells;                         // row-major order
  std::vector<std::pair<NodeId, NodeId>> adjacency;    // first < second
  bool degenerate = false;  // footprint area below one cell

  const GridCell* at(std::uint32_t row, std::uint32_t col) const;

 private:
  friend DiscretizedSpace discretize(const Footprint&, double, Adjacency);
  std::vector<std::int32_t> lookup_;  // rows*cols -> index into cells or -1
};

double signed_area(const std::vector<Point>& polygon);
bool point_in_polygon(const std::vector<Point>& polygon, Point p);  // boundary inclusive
bool is_simple_polygon(const std::vector<Point>& polygon);

/// Throws Errc::InvalidPolygon for fewer than 3 vertices, non-positive signed
/// area or self-intersection, and InvalidArgument for a non-positive cell size.
DiscretizedSpace discretize(const Footprint& footprint, double cell_size,
                            Adjacency adjacency = Adjacency::Rook);

/// The kept cell whose square contains `p`; on shared borders the lowest
/// (row, col) candidate wins.
const GridCell* locate_cell(const DiscretizedSpace& space, Point p);

/// Kept cells whose centers lie within `radius` of `p`, plus the containing cell.
std::vector<const GridCell*> cells_near(const DiscretizedSpace& space, Point p, double radius);

/// Adds CELL nodes, ADJACENT edges and (when the space node is present)
/// PART_OF edges linking each cell to its space. The grid parameters are
/// stored on the space node so spaces_from_graph can rebuild the grid.
void merge_space(PropertyGraph& graph, const DiscretizedSpace& space);

/// Adds AT edges from `node` to every cell returned by cells_near. Returns the
/// number of edges added. With no cell in range: throws Errc::NoCellInRange
/// when `strict`, otherwise records a diagnostic and adds nothing.
std::size_t attach_fixed_node(PropertyGraph& graph, const DiscretizedSpace& space, NodeId node,
                              Point position, double radius, bool strict = false,
                              Diagnostics* diagnostics = nullptr);

/// Rebuilds every DiscretizedSpace previously merged into `graph`.
std::vector<DiscretizedSpace> spaces_from_graph(const PropertyGraph& graph);

/// A position on a footprint sidecar entry, e.g. a door or window location.
struct Anchor {
  std::int64_t entity_id = 0;
  Point position;
};

struct FootprintRecord {
  Footprint footprint;
  std::vector<Anchor> anchors;
};

/// Sidecar JSON: [{"space_id": 5, "polygon": [[x,y],...], "elevation": 0,
/// "anchors": [{"entity_id": 7, "x": 1, "y": 2}]}]. Clockwise polygons are
/// reoriented.
std::vector<FootprintRecord> parse_footprints(std::string_view json_text);
std::vector<FootprintRecord> read_footprints(const std::filesystem::path& path);

}  // namespace b2v
