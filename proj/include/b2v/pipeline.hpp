#pragma once

// The stages behind each CLI command, callable without the CLI.

#include <map>
#include <string>

#include "b2v/diagnostics.hpp"
#include "b2v/embedding.hpp"
#include "b2v/ifc_graph.hpp"
#include "b2v/run_config.hpp"
#include "b2v/sgns.hpp"
#include "b2v/temporal.hpp"

namespace b2v {

struct BuildingGraph {
  PropertyGraph graph;
  BuildReport report;
  Diagnostics diagnostics;
  std::vector<DiscretizedSpace> spaces;
};

/// IFC objects and relationships, property sets, then (when configured)
/// footprint grids with door/window anchors, then sensors. Requires cfg.ifc.
BuildingGraph build_building_graph(const RunConfig& cfg);

/// Requires cfg.graph plus at least one of cfg.readings / cfg.fixes.
TemporalGraph build_temporal_graph(const RunConfig& cfg, Diagnostics* diagnostics = nullptr);

/// Reads cfg.graph; a temporal store is projected with cfg.flatten.
PropertyGraph load_embedding_input(const RunConfig& cfg);

struct EmbedResult {
  PropertyGraph graph;
  WalkCorpus corpus;
  EmbeddingMatrix embedding;  // labels taken from the graph
  TrainReport report;
};

/// Walks on cfg.workers threads, then training. The training seed follows
/// the walk seed.
EmbedResult run_embedding(const PropertyGraph& graph, const RunConfig& cfg);

std::set<std::string> parse_filter(std::string_view text);

/// Node counts per label.
std::map<std::string, std::size_t> label_counts(const PropertyGraph& graph);

}  // namespace b2v
