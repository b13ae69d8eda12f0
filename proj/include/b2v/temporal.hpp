#pragma once

// Time-bucketed snapshots of a building graph with moving occupants and
// sensor readings, plus the T x N x N adjacency tensor export.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "b2v/diagnostics.hpp"
#include "b2v/embedding.hpp"
#include "b2v/graph.hpp"
#include "b2v/space_grid.hpp"

namespace b2v {

// --- static sensors -----------------------------------------------------

struct SensorPlacement {
  NodeId sensor;
  NodeId space;
  Point position;
};

/// CSV `sensor_id,space_id,x,y`. Bare integers are read as sensor:N and ifc:N.
std::vector<SensorPlacement> parse_sensor_manifest(std::string_view csv);
std::vector<SensorPlacement> read_sensor_manifest(const std::filesystem::path& path);

/// Adds SENSOR nodes (attributes space, x, y) and AT edges to the cells
/// within `radius` (cell size of the space when unset). Throws UnknownNode
/// when the space has no grid.
void attach_sensors(PropertyGraph& graph, const std::vector<DiscretizedSpace>& spaces,
                    const std::vector<SensorPlacement>& sensors,
                    std::optional<double> radius = std::nullopt, bool strict = false,
                    Diagnostics* diagnostics = nullptr);

// --- time series --------------------------------------------------------

struct SensorReading {
  NodeId sensor;
  std::int64_t timestamp = 0;
  std::string channel;
  double value = 0;
};

struct OccupantFix {
  NodeId occupant;
  std::int64_t timestamp = 0;
  NodeId space;
  Point position;
  std::optional<Comfort> feedback;
};

/// CSV `timestamp,sensor_id,channel,value`.
std::vector<SensorReading> parse_readings(std::string_view csv);
std::vector<SensorReading> read_readings(const std::filesystem::path& path);
/// CSV `timestamp,occupant_id,space_id,x,y[,feedback]`; empty feedback allowed.
std::vector<OccupantFix> parse_fixes(std::string_view csv);
std::vector<OccupantFix> read_fixes(const std::filesystem::path& path);

// --- snapshots ----------------------------------------------------------

struct TemporalConfig {
  std::int64_t step = 300;
  /// AT radius for occupants; the space's cell size when unset.
  std::optional<double> occupant_radius;
  /// Windows an occupant stays at its last cell without a new fix.
  std::uint32_t max_gap = 10;

  void validate() const;
};

struct Snapshot {
  std::int64_t timestamp = 0;  // window start
  PropertyGraph graph;

  bool operator==(const Snapshot&) const = default;
};

struct TemporalGraph {
  PropertyGraph base;
  std::int64_t step = 0;
  std::vector<Snapshot> snapshots;
  std::vector<NodeId> node_index;  // ascending, union of all snapshot nodes

  std::optional<std::uint32_t> index_of(const NodeId& id) const;
  bool operator==(const TemporalGraph&) const = default;
};

/// Windows are [t0 + k*step, t0 + (k+1)*step) with t0 the earliest record.
/// Per window: the latest reading of each (sensor, channel) becomes a sensor
/// attribute; each occupant present (latest fix at most max_gap windows old)
/// gets an OCCUPANT node with attributes space, x, y and AT edges to its
/// cells; the latest in-window fix carrying feedback sets `feedback` to the
/// one-hot vector. `workers` > 1 builds windows in parallel.
/// Throws EmptyTimeline, UnknownNode, InvalidArgument.
TemporalGraph build_snapshots(const PropertyGraph& base, const std::vector<DiscretizedSpace>& spaces,
                              std::vector<SensorReading> readings, std::vector<OccupantFix> fixes,
                              const TemporalConfig& cfg, int workers = 1,
                              Diagnostics* diagnostics = nullptr);
/// Single-threaded reference.
TemporalGraph build_snapshots_serial(const PropertyGraph& base,
                                     const std::vector<DiscretizedSpace>& spaces,
                                     std::vector<SensorReading> readings,
                                     std::vector<OccupantFix> fixes, const TemporalConfig& cfg,
                                     Diagnostics* diagnostics = nullptr);

// --- projections --------------------------------------------------------

struct FlattenMode {
  bool union_all = true;
  std::size_t slice = 0;

  static FlattenMode all() { return {true, 0}; }
  static FlattenMode at(std::size_t t) { return {false, t}; }
  /// "union" or "slice:N".
  static FlattenMode parse(std::string_view text);
};

/// Union: the base graph plus every edge that appears in some snapshot but
/// not in the base, weighted by the fraction of snapshots containing it;
/// node attributes come from the latest snapshot holding the node.
/// Slice: snapshot t unchanged. Throws SliceOutOfRange.
PropertyGraph flatten(const TemporalGraph& tg, FlattenMode mode);

struct TensorRecord {
  std::uint32_t t = 0;
  std::uint32_t i = 0;
  std::uint32_t j = 0;  // i < j
  double w = 0;

  bool operator==(const TensorRecord&) const = default;
};

struct AdjacencyTensor {
  std::size_t T = 0;
  std::size_t N = 0;
  std::vector<std::int64_t> timestamps;
  std::vector<NodeId> nodes;
  std::vector<TensorRecord> records;  // sorted by (t, i, j); parallel edges summed
};

/// Throws EmptyTimeline when there are no snapshots.
AdjacencyTensor adjacency_tensor(const TemporalGraph& tg);
/// manifest.json and tensor.csv (`t,i,j,w`) under `out_dir`.
void write_tensor(const AdjacencyTensor& tensor, const std::filesystem::path& out_dir);
std::string tensor_manifest_json(const AdjacencyTensor& tensor);
std::string tensor_csv(const AdjacencyTensor& tensor);

// --- persistence --------------------------------------------------------

/// Text store: a header line, then the base graph and each snapshot as
/// graph text blocks introduced by `B <lines>` / `S <timestamp> <lines>`.
std::string write_temporal(const TemporalGraph& tg);
TemporalGraph read_temporal_text(std::string_view text);
void save_temporal(const TemporalGraph& tg, const std::filesystem::path& path);
TemporalGraph load_temporal(const std::filesystem::path& path);
/// True when `path` starts with the temporal store header.
bool is_temporal_file(const std::filesystem::path& path);

}  // namespace b2v
