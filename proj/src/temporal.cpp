#include "b2v/temporal.hpp"

#include <omp.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "b2v/error.hpp"
#include "b2v/text.hpp"
#include "json.hpp"

namespace b2v {

namespace {

constexpr std::string_view kStoreHeader = "B2VTEMPORAL 1";

// "7" reads as a node of `kind`; "sensor:7" style ids are taken as written.
std::optional<NodeId> node_field(std::string_view text, NodeKind kind) {
  text = trim(text);
  if (text.find(':') != std::string_view::npos) return NodeId::try_parse(text);
  const auto n = parse_uint(text);
  if (!n) return std::nullopt;
  switch (kind) {
    case NodeKind::Sensor: return NodeId::sensor(*n);
    case NodeKind::Occupant: return NodeId::occupant(*n);
    default: return NodeId::ifc(static_cast<std::int64_t>(*n));
  }
}

struct Columns {
  const CsvTable& table;
  std::vector<std::size_t> pos;

  Columns(const CsvTable& t, std::initializer_list<std::string_view> required) : table(t) {
    for (auto name : required) {
      const auto c = t.column(name);
      if (!c) throw Error(Errc::FormatError, "CSV is missing column '" + std::string(name) + "'", 1, 1);
      pos.push_back(*c);
    }
  }

  const std::string& get(std::size_t row, std::size_t which) const {
    const auto& r = table.rows[row];
    if (pos[which] >= r.size()) {
      throw Error(Errc::FormatError, "row has too few fields", table.row_lines[row], 1);
    }
    return r[pos[which]];
  }

  [[noreturn]] void fail(std::size_t row, const std::string& msg) const {
    throw Error(Errc::FormatError, msg, table.row_lines[row], 1);
  }

  NodeId node(std::size_t row, std::size_t which, NodeKind kind) const {
    const auto id = node_field(get(row, which), kind);
    if (!id) fail(row, "bad node id '" + get(row, which) + "'");
    return *id;
  }
  double number(std::size_t row, std::size_t which) const {
    const auto v = parse_double(get(row, which));
    if (!v || !std::isfinite(*v)) fail(row, "bad number '" + get(row, which) + "'");
    return *v;
  }
  std::int64_t timestamp(std::size_t row, std::size_t which) const {
    const auto v = parse_int(get(row, which));
    if (!v || *v < 0) fail(row, "bad timestamp '" + get(row, which) + "'");
    return *v;
  }
};

const std::set<std::string, std::less<>> kReservedSensorAttrs{"space", "x", "y"};

}  // namespace

// --- static sensors -----------------------------------------------------

std::vector<SensorPlacement> parse_sensor_manifest(std::string_view csv) {
  const auto table = parse_csv(csv);
  const Columns c(table, {"sensor_id", "space_id", "x", "y"});
  std::vector<SensorPlacement> out;
  std::set<NodeId> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    SensorPlacement s{c.node(r, 0, NodeKind::Sensor), c.node(r, 1, NodeKind::Ifc),
                      {c.number(r, 2), c.number(r, 3)}};
    if (!seen.insert(s.sensor).second) {
      throw Error(Errc::DuplicateId, "sensor " + s.sensor.str() + " listed twice", table.row_lines[r], 1);
    }
    out.push_back(s);
  }
  return out;
}

std::vector<SensorPlacement> read_sensor_manifest(const std::filesystem::path& path) {
  return parse_sensor_manifest(read_file(path));
}

namespace {

const DiscretizedSpace& space_for(const std::vector<DiscretizedSpace>& spaces, const NodeId& id) {
  for (const auto& s : spaces) {
    if (s.footprint.space_node == id) return s;
  }
  throw Error(Errc::UnknownNode, "space " + id.str() + " has no discretized footprint");
}

Attributes placement_attributes(const NodeId& space, Point p) {
  return {{"space", static_cast<std::int64_t>(space.key())}, {"x", p.x}, {"y", p.y}};
}

}  // namespace

void attach_sensors(PropertyGraph& graph, const std::vector<DiscretizedSpace>& spaces,
                    const std::vector<SensorPlacement>& sensors, std::optional<double> radius,
                    bool strict, Diagnostics* diagnostics) {
  for (const auto& s : sensors) {
    const auto& space = space_for(spaces, s.space);
    graph.add_node(s.sensor, std::string(kLabelSensor), placement_attributes(s.space, s.position));
    attach_fixed_node(graph, space, s.sensor, s.position, radius.value_or(space.cell_size), strict,
                      diagnostics);
  }
}

// --- time series --------------------------------------------------------

std::vector<SensorReading> parse_readings(std::string_view csv) {
  const auto table = parse_csv(csv);
  const Columns c(table, {"timestamp", "sensor_id", "channel", "value"});
  std::vector<SensorReading> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    SensorReading s{c.node(r, 1, NodeKind::Sensor), c.timestamp(r, 0), c.get(r, 2), c.number(r, 3)};
    if (s.channel.empty()) c.fail(r, "empty channel");
    if (kReservedSensorAttrs.count(s.channel)) c.fail(r, "channel name '" + s.channel + "' is reserved");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SensorReading> read_readings(const std::filesystem::path& path) {
  return parse_readings(read_file(path));
}

std::vector<OccupantFix> parse_fixes(std::string_view csv) {
  const auto table = parse_csv(csv);
  const Columns c(table, {"timestamp", "occupant_id", "space_id", "x", "y"});
  const auto fb = table.column("feedback");
  std::vector<OccupantFix> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    OccupantFix f{c.node(r, 1, NodeKind::Occupant), c.timestamp(r, 0), c.node(r, 2, NodeKind::Ifc),
                  {c.number(r, 3), c.number(r, 4)}, std::nullopt};
    if (fb && *fb < table.rows[r].size() && !table.rows[r][*fb].empty()) {
      f.feedback = parse_comfort(table.rows[r][*fb]);
      if (!f.feedback) c.fail(r, "unknown feedback '" + table.rows[r][*fb] + "'");
    }
    out.push_back(f);
  }
  return out;
}

std::vector<OccupantFix> read_fixes(const std::filesystem::path& path) {
  return parse_fixes(read_file(path));
}

// --- snapshots ----------------------------------------------------------

void TemporalConfig::validate() const {
  if (step <= 0) throw Error(Errc::InvalidArgument, "step must be positive");
  if (occupant_radius && !(*occupant_radius >= 0)) {
    throw Error(Errc::InvalidArgument, "occupant_radius must be non-negative");
  }
}

std::optional<std::uint32_t> TemporalGraph::index_of(const NodeId& id) const {
  const auto it = std::lower_bound(node_index.begin(), node_index.end(), id);
  if (it == node_index.end() || *it != id) return std::nullopt;
  return static_cast<std::uint32_t>(it - node_index.begin());
}

namespace {

struct Timeline {
  const PropertyGraph& base;
  const TemporalConfig& cfg;
  std::int64_t t0 = 0;
  std::size_t windows = 0;
  std::vector<std::vector<const SensorReading*>> readings_by_window;
  std::map<NodeId, std::vector<const OccupantFix*>> fixes_by_occupant;  // time-ordered
  std::map<NodeId, const DiscretizedSpace*> spaces;

  std::size_t window_of(std::int64_t t) const { return static_cast<std::size_t>((t - t0) / cfg.step); }

  Snapshot build(std::size_t k, Diagnostics& diag) const {
    Snapshot snap{t0 + static_cast<std::int64_t>(k) * cfg.step, base};
    auto& g = snap.graph;
    // Input is time-ordered, so later readings overwrite earlier ones.
    for (const auto* r : readings_by_window[k]) g.node(r->sensor).attributes[r->channel] = r->value;

    for (const auto& [occ, fixes] : fixes_by_occupant) {
      const auto after = std::upper_bound(fixes.begin(), fixes.end(), k, [&](std::size_t w, const OccupantFix* f) {
        return w < window_of(f->timestamp);
      });
      if (after == fixes.begin()) continue;
      const OccupantFix& last = **(after - 1);
      const auto last_window = window_of(last.timestamp);
      if (k - last_window > cfg.max_gap) continue;

      auto& node = g.add_node(occ, std::string(kLabelOccupant));
      node.attributes = placement_attributes(last.space, last.position);
      for (auto it = after; it != fixes.begin();) {
        --it;
        if (window_of((*it)->timestamp) != k) break;
        if ((*it)->feedback) {
          const auto hot = one_hot(*(*it)->feedback);
          node.attributes["feedback"] = std::vector<double>(hot.begin(), hot.end());
          break;
        }
      }
      const auto& space = *spaces.at(last.space);
      Diagnostics local;
      attach_fixed_node(g, space, occ, last.position, cfg.occupant_radius.value_or(space.cell_size),
                        false, &local);
      if (last_window == k) {
        for (auto& m : local.messages) diag.add("window " + std::to_string(k) + ": " + m);
      }
    }
    return snap;
  }
};

Timeline make_timeline(const PropertyGraph& base, const std::vector<DiscretizedSpace>& spaces,
                       std::vector<SensorReading>& readings, std::vector<OccupantFix>& fixes,
                       const TemporalConfig& cfg) {
  cfg.validate();
  if (readings.empty() && fixes.empty()) {
    throw Error(Errc::EmptyTimeline, "no sensor readings and no occupant fixes");
  }
  Timeline tl{base, cfg, 0, 0, {}, {}, {}};
  for (const auto& s : spaces) tl.spaces[s.footprint.space_node] = &s;

  for (const auto& r : readings) {
    if (r.timestamp < 0) throw Error(Errc::InvalidArgument, "negative reading timestamp");
    if (r.channel.empty()) throw Error(Errc::InvalidArgument, "reading with empty channel");
    if (!base.contains(r.sensor)) throw Error(Errc::UnknownNode, "reading for unknown sensor " + r.sensor.str());
  }
  for (const auto& f : fixes) {
    if (f.timestamp < 0) throw Error(Errc::InvalidArgument, "negative fix timestamp");
    if (!base.contains(f.space) || !tl.spaces.count(f.space)) {
      throw Error(Errc::UnknownNode, "fix for " + f.occupant.str() + " names unknown space " + f.space.str());
    }
    if (const auto* n = base.find(f.occupant); n && n->label != kLabelOccupant) {
      throw Error(Errc::InvalidArgument, f.occupant.str() + " is already a " + n->label + " node");
    }
  }

  // Normalize order so ties resolve the same way whatever the input order.
  std::sort(readings.begin(), readings.end(), [](const auto& a, const auto& b) {
    return std::tie(a.timestamp, a.sensor, a.channel, a.value) < std::tie(b.timestamp, b.sensor, b.channel, b.value);
  });
  std::sort(fixes.begin(), fixes.end(), [](const auto& a, const auto& b) {
    const auto fa = a.feedback ? static_cast<int>(*a.feedback) : -1;
    const auto fb = b.feedback ? static_cast<int>(*b.feedback) : -1;
    return std::tie(a.timestamp, a.occupant, a.space, a.position.x, a.position.y, fa) <
           std::tie(b.timestamp, b.occupant, b.space, b.position.x, b.position.y, fb);
  });

  std::int64_t lo = INT64_MAX, hi = INT64_MIN;
  for (const auto& r : readings) lo = std::min(lo, r.timestamp), hi = std::max(hi, r.timestamp);
  for (const auto& f : fixes) lo = std::min(lo, f.timestamp), hi = std::max(hi, f.timestamp);
  tl.t0 = lo;
  tl.windows = tl.window_of(hi) + 1;

  tl.readings_by_window.resize(tl.windows);
  for (const auto& r : readings) tl.readings_by_window[tl.window_of(r.timestamp)].push_back(&r);
  for (const auto& f : fixes) tl.fixes_by_occupant[f.occupant].push_back(&f);
  return tl;
}

TemporalGraph finish(const PropertyGraph& base, const TemporalConfig& cfg, std::vector<Snapshot> snaps) {
  TemporalGraph tg{base, cfg.step, std::move(snaps), {}};
  std::set<NodeId> ids;
  for (const auto& s : tg.snapshots) {
    for (const auto& [id, n] : s.graph.nodes()) ids.insert(id);
  }
  tg.node_index.assign(ids.begin(), ids.end());
  return tg;
}

}  // namespace

TemporalGraph build_snapshots_serial(const PropertyGraph& base, const std::vector<DiscretizedSpace>& spaces,
                                     std::vector<SensorReading> readings, std::vector<OccupantFix> fixes,
                                     const TemporalConfig& cfg, Diagnostics* diagnostics) {
  const auto tl = make_timeline(base, spaces, readings, fixes, cfg);
  std::vector<Snapshot> snaps;
  Diagnostics diag;
  for (std::size_t k = 0; k < tl.windows; ++k) snaps.push_back(tl.build(k, diag));
  if (diagnostics) {
    for (auto& m : diag.messages) diagnostics->add(m);
  }
  return finish(base, cfg, std::move(snaps));
}

TemporalGraph build_snapshots(const PropertyGraph& base, const std::vector<DiscretizedSpace>& spaces,
                              std::vector<SensorReading> readings, std::vector<OccupantFix> fixes,
                              const TemporalConfig& cfg, int workers, Diagnostics* diagnostics) {
  if (workers <= 1) {
    return build_snapshots_serial(base, spaces, std::move(readings), std::move(fixes), cfg, diagnostics);
  }
  const auto tl = make_timeline(base, spaces, readings, fixes, cfg);
  std::vector<Snapshot> snaps(tl.windows);
  std::vector<Diagnostics> diags(tl.windows);
  const auto n = static_cast<std::int64_t>(tl.windows);
#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
  for (std::int64_t k = 0; k < n; ++k) {
    const auto w = static_cast<std::size_t>(k);
    snaps[w] = tl.build(w, diags[w]);
  }
  if (diagnostics) {
    for (auto& d : diags) {
      for (auto& m : d.messages) diagnostics->add(m);
    }
  }
  return finish(base, cfg, std::move(snaps));
}

// --- projections --------------------------------------------------------

FlattenMode FlattenMode::parse(std::string_view text) {
  if (text == "union") return all();
  if (text.substr(0, 6) == "slice:") {
    if (const auto t = parse_uint(text.substr(6))) return at(static_cast<std::size_t>(*t));
  }
  throw Error(Errc::InvalidArgument, "flatten mode must be 'union' or 'slice:N', got '" + std::string(text) + "'");
}

PropertyGraph flatten(const TemporalGraph& tg, FlattenMode mode) {
  if (!mode.union_all) {
    if (mode.slice >= tg.snapshots.size()) {
      throw Error(Errc::SliceOutOfRange, "slice " + std::to_string(mode.slice) + " of " +
                                             std::to_string(tg.snapshots.size()) + " snapshots");
    }
    return tg.snapshots[mode.slice].graph;
  }
  if (tg.snapshots.empty()) throw Error(Errc::EmptyTimeline, "no snapshots to flatten");

  // Nodes with attributes from the latest snapshot holding them.
  PropertyGraph out;
  std::map<NodeId, const Node*> latest;
  for (const auto& s : tg.snapshots) {
    for (const auto& [id, n] : s.graph.nodes()) latest[id] = &n;
  }
  for (const auto& [id, n] : latest) out.add_node(id, n->label, n->attributes);
  for (const auto& e : tg.base.edges()) out.add_edge(e.a, e.b, e.label, e.weight, e.attributes);

  // Dynamic edges in first-appearance order with their snapshot counts.
  using Key = std::tuple<NodeId, NodeId, std::string>;
  std::map<Key, std::size_t> slot;
  std::vector<std::pair<const Edge*, std::size_t>> dynamic;
  const auto base_edges = tg.base.edge_count();
  for (const auto& s : tg.snapshots) {
    std::set<Key> here;
    for (std::size_t i = base_edges; i < s.graph.edges().size(); ++i) {
      const auto& e = s.graph.edges()[i];
      Key key{e.a, e.b, e.label};
      if (!here.insert(key).second) continue;
      const auto [it, fresh] = slot.emplace(key, dynamic.size());
      if (fresh) dynamic.push_back({&e, 0});
      ++dynamic[it->second].second;
    }
  }
  const double t = static_cast<double>(tg.snapshots.size());
  for (const auto& [e, count] : dynamic) {
    out.add_edge(e->a, e->b, e->label, static_cast<double>(count) / t, e->attributes);
  }
  return out;
}

AdjacencyTensor adjacency_tensor(const TemporalGraph& tg) {
  if (tg.snapshots.empty()) throw Error(Errc::EmptyTimeline, "no snapshots for the adjacency tensor");
  AdjacencyTensor out;
  out.T = tg.snapshots.size();
  out.N = tg.node_index.size();
  out.nodes = tg.node_index;
  for (std::size_t t = 0; t < tg.snapshots.size(); ++t) {
    out.timestamps.push_back(tg.snapshots[t].timestamp);
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> cells;
    for (const auto& e : tg.snapshots[t].graph.edges()) {
      auto i = *tg.index_of(e.a), j = *tg.index_of(e.b);
      if (i > j) std::swap(i, j);
      cells[{i, j}] += e.weight;
    }
    for (const auto& [ij, w] : cells) {
      out.records.push_back({static_cast<std::uint32_t>(t), ij.first, ij.second, w});
    }
  }
  return out;
}

std::string tensor_manifest_json(const AdjacencyTensor& tensor) {
  nlohmann::ordered_json j;
  j["T"] = tensor.T;
  j["N"] = tensor.N;
  j["timestamps"] = tensor.timestamps;
  auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < tensor.nodes.size(); ++i) {
    nodes.push_back({{"index", i}, {"id", tensor.nodes[i].str()}});
  }
  j["records"] = tensor.records.size();
  j["format"] = "t,i,j,w with i<j; slices symmetric, zero diagonal";
  return j.dump(2) + "\n";
}

std::string tensor_csv(const AdjacencyTensor& tensor) {
  std::string out = "t,i,j,w\n";
  for (const auto& r : tensor.records) {
    out += std::to_string(r.t) + ',' + std::to_string(r.i) + ',' + std::to_string(r.j) + ',' +
           format_double(r.w) + '\n';
  }
  return out;
}

void write_tensor(const AdjacencyTensor& tensor, const std::filesystem::path& out_dir) {
  write_file_atomic(out_dir / "manifest.json", tensor_manifest_json(tensor));
  write_file_atomic(out_dir / "tensor.csv", tensor_csv(tensor));
}

// --- persistence --------------------------------------------------------

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

std::string write_temporal(const TemporalGraph& tg) {
  std::string out(kStoreHeader);
  out += "\nstep " + std::to_string(tg.step) + "\n";
  const auto base = write_graph(tg.base);
  out += "B " + std::to_string(count_lines(base)) + "\n" + base;
  for (const auto& s : tg.snapshots) {
    const auto g = write_graph(s.graph);
    out += "S " + std::to_string(s.timestamp) + " " + std::to_string(count_lines(g)) + "\n" + g;
  }
  return out;
}

TemporalGraph read_temporal_text(std::string_view text) {
  const auto lines = split(text, '\n');
  std::size_t at = 0;
  const auto fail = [&](const std::string& msg) -> Error {
    return Error(Errc::FormatError, msg, at + 1, 1);
  };
  if (lines.empty() || trim(lines[0]) != kStoreHeader) throw fail("missing temporal store header");
  ++at;
  TemporalGraph tg;
  if (at >= lines.size() || lines[at].substr(0, 5) != "step ") throw fail("expected 'step <seconds>'");
  const auto step = parse_int(trim(lines[at].substr(5)));
  if (!step || *step <= 0) throw fail("bad step");
  tg.step = *step;
  ++at;

  const auto block = [&](std::size_t count) {
    if (at + count > lines.size()) throw fail("graph block runs past end of file");
    std::string body;
    const auto first = at;
    for (std::size_t i = 0; i < count; ++i) {
      body += lines[at++];
      body += '\n';
    }
    try {
      return read_graph_text(body);
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), first + e.line(), e.column() ? e.column() : 1);
    }
  };

  bool have_base = false;
  std::set<std::int64_t> seen;
  std::vector<Snapshot> snaps;
  for (; at < lines.size();) {
    const auto head = trim(lines[at]);
    if (head.empty()) {
      ++at;
      continue;
    }
    const auto parts = split(head, ' ');
    if (parts[0] == "B" && parts.size() == 2 && !have_base) {
      const auto n = parse_uint(parts[1]);
      if (!n) throw fail("bad base block size");
      ++at;
      tg.base = block(*n);
      have_base = true;
    } else if (parts[0] == "S" && parts.size() == 3 && have_base) {
      const auto ts = parse_int(parts[1]);
      const auto n = parse_uint(parts[2]);
      if (!ts || !n) throw fail("bad snapshot header");
      if (!snaps.empty() && *ts <= snaps.back().timestamp) throw fail("snapshot timestamps must increase");
      ++at;
      snaps.push_back({*ts, block(*n)});
    } else {
      throw fail("unexpected line '" + std::string(head) + "'");
    }
  }
  if (!have_base) throw Error(Errc::FormatError, "temporal store has no base graph");
  TemporalConfig cfg;
  cfg.step = tg.step;
  return finish(tg.base, cfg, std::move(snaps));
}

void save_temporal(const TemporalGraph& tg, const std::filesystem::path& path) {
  write_file_atomic(path, write_temporal(tg));
}

TemporalGraph load_temporal(const std::filesystem::path& path) { return read_temporal_text(read_file(path)); }

bool is_temporal_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string first;
  return in && std::getline(in, first) && trim(first) == kStoreHeader;
}

}  // namespace b2v
