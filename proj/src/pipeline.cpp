#include "b2v/pipeline.hpp"

#include "b2v/error.hpp"
#include "b2v/step.hpp"
#include "b2v/text.hpp"

namespace b2v {

namespace {

[[noreturn]] void missing(std::string_view key) {
  throw Error(Errc::InvalidArgument, "missing required setting '" + std::string(key) + "'");
}

}  // namespace

BuildingGraph build_building_graph(const RunConfig& cfg) {
  if (cfg.ifc.empty()) missing("ifc");
  BuildingGraph out;
  const auto model = step::parse_step_file(cfg.ifc);
  out.graph = build_graph(model, RelationMapping::defaults(), cfg.strict, &out.report);
  for (const auto& d : out.report.dangling) {
    out.diagnostics.add("#" + std::to_string(d.relationship) + " references missing #" + std::to_string(d.missing));
  }
  out.graph = attach_properties(std::move(out.graph), model, &out.diagnostics);

  if (!cfg.footprints.empty()) {
    for (const auto& rec : read_footprints(cfg.footprints)) {
      const auto& sid = rec.footprint.space_node;
      if (!out.graph.contains(sid)) {
        throw Error(Errc::UnknownNode, "footprint for " + sid.str() + " which is not an object in the model");
      }
      out.spaces.push_back(discretize(rec.footprint, cfg.cell_size, cfg.adjacency));
      const auto& space = out.spaces.back();
      merge_space(out.graph, space);
      for (const auto& a : rec.anchors) {
        const auto id = NodeId::ifc(a.entity_id);
        if (!out.graph.contains(id)) {
          const std::string msg = "anchor " + id.str() + " on " + sid.str() + " is not a graph node";
          if (cfg.strict) throw Error(Errc::UnknownNode, msg);
          out.diagnostics.add(msg);
          continue;
        }
        attach_fixed_node(out.graph, space, id, a.position, cfg.anchor_radius.value_or(space.cell_size),
                          cfg.strict, &out.diagnostics);
      }
    }
  }
  if (!cfg.sensors.empty()) {
    if (out.spaces.empty()) throw Error(Errc::InvalidArgument, "sensors need footprints to place them");
    attach_sensors(out.graph, out.spaces, read_sensor_manifest(cfg.sensors), cfg.sensor_radius, cfg.strict,
                   &out.diagnostics);
  }
  return out;
}

TemporalGraph build_temporal_graph(const RunConfig& cfg, Diagnostics* diagnostics) {
  if (cfg.graph.empty()) missing("graph");
  if (cfg.readings.empty() && cfg.fixes.empty()) missing("readings or fixes");
  const auto base = read_graph_file(cfg.graph);
  const auto spaces = spaces_from_graph(base);
  std::vector<SensorReading> readings;
  std::vector<OccupantFix> fixes;
  if (!cfg.readings.empty()) readings = read_readings(cfg.readings);
  if (!cfg.fixes.empty()) fixes = read_fixes(cfg.fixes);
  return build_snapshots(base, spaces, std::move(readings), std::move(fixes), cfg.temporal, cfg.workers,
                         diagnostics);
}

PropertyGraph load_embedding_input(const RunConfig& cfg) {
  if (cfg.graph.empty()) missing("graph");
  if (is_temporal_file(cfg.graph)) return flatten(load_temporal(cfg.graph), FlattenMode::parse(cfg.flatten));
  return read_graph_file(cfg.graph);
}

EmbedResult run_embedding(const PropertyGraph& graph, const RunConfig& cfg) {
  EmbedResult out;
  out.graph = graph;
  out.corpus = generate_walks(graph, cfg.walk, cfg.workers);
  auto train_cfg = cfg.train;
  train_cfg.seed = cfg.walk.seed;
  out.embedding = train(out.corpus, train_cfg, cfg.workers, &out.report);
  for (std::size_t i = 0; i < out.embedding.size(); ++i) {
    out.embedding.set_label(i, graph.node(out.embedding.vocabulary()[i]).label);
  }
  return out;
}

std::set<std::string> parse_filter(std::string_view text) {
  std::set<std::string> out;
  for (auto part : split(text, ',')) {
    part = trim(part);
    if (!part.empty()) out.emplace(part);
  }
  return out;
}

std::map<std::string, std::size_t> label_counts(const PropertyGraph& graph) {
  std::map<std::string, std::size_t> out;
  for (const auto& [id, n] : graph.nodes()) ++out[n.label];
  return out;
}

}  // namespace b2v
