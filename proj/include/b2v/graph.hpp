#pragma once

// Attributed, weighted, undirected multigraph of building components.
//
// Nodes are kept in a NodeId-ordered map so every traversal is deterministic.
// Edges live in a flat list; the incidence index maps each node to the
// positions of its edges in that list.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace b2v {

enum class NodeKind : std::uint8_t { Ifc = 0, Cell = 1, Sensor = 2, Occupant = 3 };

/// Stable node identity. IFC nodes carry the STEP entity id; synthetic nodes
/// carry a namespace tag plus a local key. Cells pack (space id, row, col).
class NodeId {
 public:
  constexpr NodeId() = default;
  constexpr NodeId(NodeKind kind, std::uint64_t key) : kind_(kind), key_(key) {}

  static NodeId ifc(std::int64_t entity_id);
  static NodeId sensor(std::uint64_t index) { return {NodeKind::Sensor, index}; }
  static NodeId occupant(std::uint64_t index) { return {NodeKind::Occupant, index}; }
  static NodeId cell(std::int64_t space_entity, std::uint32_t row, std::uint32_t col);

  NodeKind kind() const { return kind_; }
  std::uint64_t key() const { return key_; }

  // Cell accessors; only meaningful when kind() == Cell.
  std::int64_t cell_space() const { return static_cast<std::int64_t>(key_ >> 32); }
  std::uint32_t cell_row() const { return static_cast<std::uint32_t>((key_ >> 16) & 0xFFFF); }
  std::uint32_t cell_col() const { return static_cast<std::uint32_t>(key_ & 0xFFFF); }

  /// "ifc:12", "cell:5:0:1", "sensor:3", "occ:7".
  std::string str() const;
  /// Inverse of str(); a bare integer is read as an IFC entity id.
  static NodeId parse(std::string_view text);
  static std::optional<NodeId> try_parse(std::string_view text);

  auto operator<=>(const NodeId&) const = default;

 private:
  NodeKind kind_ = NodeKind::Ifc;
  std::uint64_t key_ = 0;
};

std::ostream& operator<<(std::ostream& os, const NodeId& id);

inline constexpr std::string_view kLabelCell = "CELL";
inline constexpr std::string_view kLabelSensor = "SENSOR";
inline constexpr std::string_view kLabelOccupant = "OCCUPANT";

inline constexpr std::string_view kEdgeAdjacent = "ADJACENT";
inline constexpr std::string_view kEdgeAt = "AT";
inline constexpr std::string_view kEdgePartOf = "PART_OF";

using AttrValue = std::variant<bool, std::int64_t, double, std::string, std::vector<double>>;
using Attributes = std::map<std::string, AttrValue>;

struct Node {
  NodeId id;
  std::string label;
  Attributes attributes;

  bool operator==(const Node&) const = default;
};

struct Edge {
  NodeId a;  // a < b after normalization
  NodeId b;
  std::string label;
  double weight = 1.0;
  Attributes attributes;

  bool operator==(const Edge&) const = default;
  NodeId other(const NodeId& from) const { return from == a ? b : a; }
};

class PropertyGraph {
 public:
  using NodeMap = std::map<NodeId, Node>;

  /// Inserts a node, or returns the existing one untouched when the id is taken
  /// and the label matches. A label clash throws InvalidArgument.
  Node& add_node(NodeId id, std::string label, Attributes attributes = {});
  /// Adds an undirected edge. Throws UnknownNode for a missing endpoint and
  /// InvalidArgument for self-loops or non-positive weights.
  std::size_t add_edge(NodeId u, NodeId v, std::string label, double weight = 1.0,
                       Attributes attributes = {});

  bool contains(const NodeId& id) const { return nodes_.count(id) != 0; }
  const Node* find(const NodeId& id) const;
  Node* find(const NodeId& id);
  const Node& node(const NodeId& id) const;
  Node& node(const NodeId& id);

  const NodeMap& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  /// Positions in edges() of every edge touching `id` (ascending).
  const std::vector<std::size_t>& incident(const NodeId& id) const;

  bool has_edge(const NodeId& u, const NodeId& v, std::string_view label) const;
  std::set<std::string> labels() const;

  /// Recomputes the incidence index from the edge list and compares; used by
  /// consistency checks.
  bool incidence_consistent() const;

  bool operator==(const PropertyGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  NodeMap nodes_;
  std::vector<Edge> edges_;
  std::map<NodeId, std::vector<std::size_t>> incidence_;
};

/// Induced subgraph on nodes whose label is in `labels`.
PropertyGraph subgraph(const PropertyGraph& graph, const std::set<std::string>& labels);

// Line-delimited text form:
//   N<TAB>id<TAB>label<TAB>{attrs json}
//   E<TAB>idA<TAB>idB<TAB>label<TAB>weight<TAB>{attrs json}
void write_graph(std::ostream& os, const PropertyGraph& graph);
std::string write_graph(const PropertyGraph& graph);
PropertyGraph read_graph(std::istream& is);
PropertyGraph read_graph_text(std::string_view text);
PropertyGraph read_graph_file(const std::filesystem::path& path);

std::string attributes_to_json(const Attributes& attrs);
Attributes attributes_from_json(std::string_view text);

}  // namespace b2v
