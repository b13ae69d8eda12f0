#include "b2v/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include "json.hpp"
#include <sstream>

#include "b2v/error.hpp"
#include "b2v/text.hpp"

namespace b2v {

using json = nlohmann::json;

NodeId NodeId::ifc(std::int64_t entity_id) {
  if (entity_id <= 0) throw Error(Errc::InvalidArgument, "IFC entity ids are positive");
  return {NodeKind::Ifc, static_cast<std::uint64_t>(entity_id)};
}

NodeId NodeId::cell(std::int64_t space_entity, std::uint32_t row, std::uint32_t col) {
  if (space_entity <= 0 || space_entity > std::numeric_limits<std::uint32_t>::max() ||
      row > 0xFFFF || col > 0xFFFF) {
    throw Error(Errc::InvalidArgument, "cell id out of range (space " +
                                           std::to_string(space_entity) + ", row " +
                                           std::to_string(row) + ", col " + std::to_string(col) +
                                           ")");
  }
  return {NodeKind::Cell, (static_cast<std::uint64_t>(space_entity) << 32) |
                              (static_cast<std::uint64_t>(row) << 16) | col};
}

std::string NodeId::str() const {
  switch (kind_) {
    case NodeKind::Ifc: return "ifc:" + std::to_string(key_);
    case NodeKind::Cell:
      return "cell:" + std::to_string(cell_space()) + ":" + std::to_string(cell_row()) + ":" +
             std::to_string(cell_col());
    case NodeKind::Sensor: return "sensor:" + std::to_string(key_);
    case NodeKind::Occupant: return "occ:" + std::to_string(key_);
  }
  return "?";
}

std::ostream& operator<<(std::ostream& os, const NodeId& id) { return os << id.str(); }

std::optional<NodeId> NodeId::try_parse(std::string_view text) {
  text = trim(text);
  auto fields = split(text, ':');
  std::vector<std::uint64_t> nums;
  const std::size_t first_num = fields.size() == 1 ? 0 : 1;
  for (std::size_t i = first_num; i < fields.size(); ++i) {
    auto v = parse_uint(fields[i]);
    if (!v) return std::nullopt;
    nums.push_back(*v);
  }
  if (fields.size() == 1) {
    if (nums[0] == 0) return std::nullopt;
    return NodeId{NodeKind::Ifc, nums[0]};
  }
  const auto tag = fields[0];
  if (tag == "ifc" && nums.size() == 1 && nums[0] > 0) return NodeId{NodeKind::Ifc, nums[0]};
  if (tag == "sensor" && nums.size() == 1) return NodeId::sensor(nums[0]);
  if ((tag == "occ" || tag == "occupant") && nums.size() == 1) return NodeId::occupant(nums[0]);
  if (tag == "cell" && nums.size() == 3 && nums[0] > 0 &&
      nums[0] <= std::numeric_limits<std::uint32_t>::max() && nums[1] <= 0xFFFF &&
      nums[2] <= 0xFFFF) {
    return NodeId::cell(static_cast<std::int64_t>(nums[0]), static_cast<std::uint32_t>(nums[1]),
                        static_cast<std::uint32_t>(nums[2]));
  }
  return std::nullopt;
}

NodeId NodeId::parse(std::string_view text) {
  if (auto id = try_parse(text)) return *id;
  throw Error(Errc::FormatError, "invalid node id '" + std::string(text) + "'");
}

Node& PropertyGraph::add_node(NodeId id, std::string label, Attributes attributes) {
  if (label.empty()) throw Error(Errc::InvalidArgument, "node " + id.str() + " needs a label");
  auto it = nodes_.find(id);
  if (it != nodes_.end()) {
    if (it->second.label != label) {
      throw Error(Errc::InvalidArgument, "node " + id.str() + " already labeled " +
                                             it->second.label + ", not " + label);
    }
    return it->second;
  }
  auto& node = nodes_[id];
  node.id = id;
  node.label = std::move(label);
  node.attributes = std::move(attributes);
  incidence_[id];
  return node;
}

std::size_t PropertyGraph::add_edge(NodeId u, NodeId v, std::string label, double weight,
                                    Attributes attributes) {
  if (!contains(u)) throw Error(Errc::UnknownNode, "edge endpoint " + u.str() + " missing");
  if (!contains(v)) throw Error(Errc::UnknownNode, "edge endpoint " + v.str() + " missing");
  if (u == v) throw Error(Errc::InvalidArgument, "self-loop on " + u.str());
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw Error(Errc::InvalidArgument, "edge weight must be positive and finite");
  }
  if (label.empty()) throw Error(Errc::InvalidArgument, "edge needs a label");
  if (v < u) std::swap(u, v);
  const std::size_t index = edges_.size();
  edges_.push_back(Edge{u, v, std::move(label), weight, std::move(attributes)});
  incidence_[u].push_back(index);
  incidence_[v].push_back(index);
  return index;
}

const Node* PropertyGraph::find(const NodeId& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

Node* PropertyGraph::find(const NodeId& id) {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const Node& PropertyGraph::node(const NodeId& id) const {
  if (const auto* n = find(id)) return *n;
  throw Error(Errc::UnknownNode, "no node " + id.str());
}

Node& PropertyGraph::node(const NodeId& id) {
  if (auto* n = find(id)) return *n;
  throw Error(Errc::UnknownNode, "no node " + id.str());
}

const std::vector<std::size_t>& PropertyGraph::incident(const NodeId& id) const {
  auto it = incidence_.find(id);
  if (it == incidence_.end()) throw Error(Errc::UnknownNode, "no node " + id.str());
  return it->second;
}

bool PropertyGraph::has_edge(const NodeId& u, const NodeId& v, std::string_view label) const {
  auto it = incidence_.find(u);
  if (it == incidence_.end()) return false;
  for (auto idx : it->second) {
    const auto& e = edges_[idx];
    if (e.other(u) == v && e.label == label) return true;
  }
  return false;
}

std::set<std::string> PropertyGraph::labels() const {
  std::set<std::string> out;
  for (const auto& [id, n] : nodes_) out.insert(n.label);
  return out;
}

bool PropertyGraph::incidence_consistent() const {
  std::map<NodeId, std::vector<std::size_t>> rebuilt;
  for (const auto& [id, n] : nodes_) rebuilt[id];
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (!contains(e.a) || !contains(e.b)) return false;
    rebuilt[e.a].push_back(i);
    rebuilt[e.b].push_back(i);
  }
  return rebuilt == incidence_;
}

PropertyGraph subgraph(const PropertyGraph& graph, const std::set<std::string>& labels) {
  PropertyGraph out;
  for (const auto& [id, n] : graph.nodes()) {
    if (labels.count(n.label)) out.add_node(id, n.label, n.attributes);
  }
  for (const auto& e : graph.edges()) {
    if (out.contains(e.a) && out.contains(e.b)) {
      out.add_edge(e.a, e.b, e.label, e.weight, e.attributes);
    }
  }
  return out;
}

std::string attributes_to_json(const Attributes& attrs) {
  json j = json::object();
  for (const auto& [key, value] : attrs) {
    std::visit([&](const auto& v) { j[key] = v; }, value);
  }
  return j.dump();
}

Attributes attributes_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw Error(Errc::FormatError, std::string("bad attribute JSON: ") + ex.what());
  }
  if (!j.is_object()) throw Error(Errc::FormatError, "attributes must be a JSON object");
  Attributes out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& v = it.value();
    if (v.is_boolean()) {
      out[it.key()] = v.get<bool>();
    } else if (v.is_number_integer()) {
      out[it.key()] = v.get<std::int64_t>();
    } else if (v.is_number_float()) {
      out[it.key()] = v.get<double>();
    } else if (v.is_string()) {
      out[it.key()] = v.get<std::string>();
    } else if (v.is_array()) {
      std::vector<double> xs;
      for (const auto& x : v) {
        if (!x.is_number()) throw Error(Errc::FormatError, "array attributes must be numeric");
        xs.push_back(x.get<double>());
      }
      out[it.key()] = std::move(xs);
    } else {
      throw Error(Errc::FormatError, "unsupported attribute value for key " + it.key());
    }
  }
  return out;
}

void write_graph(std::ostream& os, const PropertyGraph& graph) {
  for (const auto& [id, n] : graph.nodes()) {
    os << "N\t" << id.str() << '\t' << n.label << '\t' << attributes_to_json(n.attributes)
       << '\n';
  }
  for (const auto& e : graph.edges()) {
    os << "E\t" << e.a.str() << '\t' << e.b.str() << '\t' << e.label << '\t'
       << format_double(e.weight) << '\t' << attributes_to_json(e.attributes) << '\n';
  }
}

std::string write_graph(const PropertyGraph& graph) {
  std::ostringstream os;
  write_graph(os, graph);
  return os.str();
}

PropertyGraph read_graph(std::istream& is) {
  PropertyGraph g;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> pending_edges;
  std::vector<std::size_t> pending_lines;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    try {
      if (fields[0] == "N") {
        if (fields.size() != 4) throw Error(Errc::FormatError, "node record needs 4 fields");
        g.add_node(NodeId::parse(fields[1]), std::string(fields[2]),
                   attributes_from_json(fields[3]));
      } else if (fields[0] == "E") {
        pending_edges.push_back(line);
        pending_lines.push_back(line_no);
      } else {
        throw Error(Errc::FormatError, "unknown record type '" + std::string(fields[0]) + "'");
      }
    } catch (const Error& ex) {
      throw Error(ex.code(), ex.detail(), line_no, 1);
    }
  }
  for (std::size_t i = 0; i < pending_edges.size(); ++i) {
    auto fields = split(pending_edges[i], '\t');
    try {
      if (fields.size() != 6) throw Error(Errc::FormatError, "edge record needs 6 fields");
      auto w = parse_double(fields[4]);
      if (!w) throw Error(Errc::FormatError, "bad edge weight");
      g.add_edge(NodeId::parse(fields[1]), NodeId::parse(fields[2]), std::string(fields[3]), *w,
                 attributes_from_json(fields[5]));
    } catch (const Error& ex) {
      throw Error(ex.code(), ex.detail(), pending_lines[i], 1);
    }
  }
  return g;
}

PropertyGraph read_graph_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  return read_graph(is);
}

PropertyGraph read_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  return read_graph(in);
}

}  // namespace b2v
