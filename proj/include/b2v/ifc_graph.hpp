#pragma once

// StepModel -> PropertyGraph conversion.
//
// Objects (spaces, walls, doors, ...) become nodes labeled with their IFC type.
// Objectified relationships (IFCREL*) are expanded into one undirected edge per
// (relating, related) pair and never become nodes themselves.

#include <string>
#include <vector>

#include "b2v/diagnostics.hpp"
#include "b2v/graph.hpp"
#include "b2v/step.hpp"

namespace b2v {

/// How one relationship entity type expands into edges. Attribute positions are
/// zero-based; either slot may hold a single reference or an aggregate.
struct RelationRule {
  std::string type_name;
  std::string edge_label;
  std::size_t relating_attr = 0;
  std::size_t related_attr = 0;
};

struct RelationMapping {
  std::vector<RelationRule> rules;
  /// Object types kept as nodes, matched by prefix on the upper-case type name.
  std::vector<std::string> object_prefixes;
  /// Suffixes that exclude an otherwise matching type (type objects, styles).
  std::vector<std::string> excluded_suffixes;
  double edge_weight = 1.0;

  static RelationMapping defaults();

  bool is_object(std::string_view type_name) const;
  const RelationRule* rule_for(std::string_view type_name) const;
};

struct DanglingPair {
  step::EntityId relationship = 0;
  step::EntityId missing = 0;
  bool operator==(const DanglingPair&) const = default;
};

struct BuildReport {
  std::vector<DanglingPair> dangling;
  std::size_t skipped_non_object = 0;  // endpoints that exist but are not whitelisted
  std::size_t skipped_self_loops = 0;
};

/// Throws Errc::DanglingReference on the first dangling pair when `strict`;
/// otherwise skips it and records it in `report`.
PropertyGraph build_graph(const step::StepModel& model, const RelationMapping& mapping,
                          bool strict = false, BuildReport* report = nullptr);

/// Copies single-value properties from IFCRELDEFINESBYPROPERTIES property sets
/// onto the related object nodes, later relationship ids overwriting earlier ones.
PropertyGraph attach_properties(PropertyGraph graph, const step::StepModel& model,
                                Diagnostics* diagnostics = nullptr);

}  // namespace b2v
