#include "b2v/ifc_graph.hpp"

#include <algorithm>

#include "b2v/error.hpp"

namespace b2v {

using step::Aggregate;
using step::EntityId;
using step::EntityRef;
using step::StepEntity;
using step::StepModel;
using step::StepValue;
using step::TypedValue;

RelationMapping RelationMapping::defaults() {
  RelationMapping m;
  // IfcRoot contributes the first four attributes of every relationship.
  m.rules = {
      {"IFCRELAGGREGATES", "AGGREGATES", 4, 5},
      {"IFCRELCONTAINEDINSPATIALSTRUCTURE", "CONTAINS", 5, 4},
      {"IFCRELFILLSELEMENT", "FILLS", 4, 5},
      {"IFCRELVOIDSELEMENT", "VOIDS", 4, 5},
      {"IFCRELSPACEBOUNDARY", "BOUNDED_BY", 4, 5},
      {"IFCRELSPACEBOUNDARY1STLEVEL", "BOUNDED_BY", 4, 5},
      {"IFCRELSPACEBOUNDARY2NDLEVEL", "BOUNDED_BY", 4, 5},
      {"IFCRELCONNECTSELEMENTS", "CONNECTS", 5, 6},
  };
  m.object_prefixes = {"IFCSPACE",   "IFCWALL",         "IFCCURTAINWALL",
                       "IFCDOOR",    "IFCWINDOW",       "IFCSLAB",
                       "IFCCOVERING", "IFCBUILDING",    "IFCSITE",
                       "IFCFLOW",    "IFCROOF",         "IFCSTAIR",
                       "IFCRAMP",    "IFCBEAM",         "IFCCOLUMN",
                       "IFCMEMBER",  "IFCPLATE",        "IFCRAILING",
                       "IFCOPENINGELEMENT", "IFCFURNISHINGELEMENT", "IFCFURNITURE",
                       "IFCDISTRIBUTION",   "IFCENERGYCONVERSIONDEVICE", "IFCSENSOR"};
  m.excluded_suffixes = {"TYPE", "STYLE"};
  return m;
}

bool RelationMapping::is_object(std::string_view type_name) const {
  for (const auto& suffix : excluded_suffixes) {
    if (type_name.size() >= suffix.size() &&
        type_name.substr(type_name.size() - suffix.size()) == suffix) {
      return false;
    }
  }
  return std::any_of(object_prefixes.begin(), object_prefixes.end(),
                     [&](const std::string& p) { return type_name.substr(0, p.size()) == p; });
}

const RelationRule* RelationMapping::rule_for(std::string_view type_name) const {
  for (const auto& r : rules) {
    if (r.type_name == type_name) return &r;
  }
  return nullptr;
}

namespace {

Attributes identity_attributes(const StepEntity& e) {
  Attributes attrs;
  if (!e.attributes.empty()) {
    if (const auto* gid = e.attributes[0].get_if<std::string>()) attrs["GlobalId"] = *gid;
  }
  if (e.attributes.size() > 2) {
    if (const auto* name = e.attributes[2].get_if<std::string>()) attrs["Name"] = *name;
  }
  return attrs;
}

std::vector<EntityId> refs_in(const StepEntity& e, std::size_t index) {
  std::vector<EntityId> out;
  if (index < e.attributes.size()) step::collect_references(e.attributes[index], out);
  return out;
}

}  // namespace

PropertyGraph build_graph(const StepModel& model, const RelationMapping& mapping, bool strict,
                          BuildReport* report) {
  PropertyGraph g;
  BuildReport local;
  BuildReport& rep = report ? *report : local;

  for (const auto& [id, e] : model.entities()) {
    if (mapping.is_object(e.type_name)) g.add_node(NodeId::ifc(id), e.type_name, identity_attributes(e));
  }

  for (const auto& [rel_id, rel] : model.entities()) {
    const auto* rule = mapping.rule_for(rel.type_name);
    if (!rule) continue;
    const auto relating = refs_in(rel, rule->relating_attr);
    const auto related = refs_in(rel, rule->related_attr);

    bool relating_ok = !relating.empty();
    for (auto r : relating) {
      if (!model.contains(r)) {
        if (strict) {
          throw Error(Errc::DanglingReference, "relationship #" + std::to_string(rel_id) +
                                                   " references missing #" + std::to_string(r));
        }
        rep.dangling.push_back({rel_id, r});
        relating_ok = false;
      }
    }
    for (auto target : related) {
      if (!model.contains(target)) {
        if (strict) {
          throw Error(Errc::DanglingReference, "relationship #" + std::to_string(rel_id) +
                                                   " references missing #" +
                                                   std::to_string(target));
        }
        rep.dangling.push_back({rel_id, target});
        continue;
      }
      if (!relating_ok) continue;
      for (auto source : relating) {
        const auto a = NodeId::ifc(source);
        const auto b = NodeId::ifc(target);
        if (!g.contains(a) || !g.contains(b)) {
          ++rep.skipped_non_object;
          continue;
        }
        if (a == b) {
          ++rep.skipped_self_loops;
          continue;
        }
        g.add_edge(a, b, rule->edge_label, mapping.edge_weight,
                   {{"relationship", static_cast<std::int64_t>(rel_id)}});
      }
    }
  }
  return g;
}

namespace {

std::optional<AttrValue> scalar_from(const StepValue& v) {
  const StepValue* inner = &v;
  if (const auto* t = v.get_if<TypedValue>()) inner = &t->value();
  if (const auto* i = inner->get_if<std::int64_t>()) return AttrValue{*i};
  if (const auto* d = inner->get_if<double>()) return AttrValue{*d};
  if (const auto* s = inner->get_if<std::string>()) return AttrValue{*s};
  if (const auto* en = inner->get_if<step::Enumeration>()) {
    if (en->token == "T" || en->token == "TRUE") return AttrValue{true};
    if (en->token == "F" || en->token == "FALSE") return AttrValue{false};
    return AttrValue{en->token};
  }
  return std::nullopt;
}

}  // namespace

PropertyGraph attach_properties(PropertyGraph graph, const StepModel& model,
                                Diagnostics* diagnostics) {
  const auto note = [&](const std::string& msg) {
    if (diagnostics) diagnostics->add(msg);
  };
  // entities() iterates in ascending id, which fixes the last-writer-wins order.
  for (const auto* rel : step::entities_of_type(model, "IFCRELDEFINESBYPROPERTIES")) {
    const auto targets = refs_in(*rel, 4);
    const auto defs = refs_in(*rel, 5);
    const auto rel_name = "#" + std::to_string(rel->id);
    if (defs.size() != 1) {
      note(rel_name + ": expected one property definition");
      continue;
    }
    const auto* pset = model.find(defs.front());
    if (!pset || pset->type_name != "IFCPROPERTYSET") {
      note(rel_name + ": property definition is not an IFCPROPERTYSET");
      continue;
    }
    Attributes values;
    for (auto prop_id : refs_in(*pset, 4)) {
      const auto* prop = model.find(prop_id);
      if (!prop) {
        note(rel_name + ": missing property #" + std::to_string(prop_id));
        continue;
      }
      if (prop->type_name != "IFCPROPERTYSINGLEVALUE") continue;
      if (prop->attributes.size() < 3 || !prop->attributes[0].is<std::string>()) {
        note("#" + std::to_string(prop_id) + ": malformed single-value property");
        continue;
      }
      auto value = scalar_from(prop->attributes[2]);
      if (!value) continue;  // $ or unsupported value kind
      values[prop->attributes[0].as<std::string>()] = std::move(*value);
    }
    for (auto target : targets) {
      auto* node = graph.find(NodeId::ifc(target));
      if (!node) continue;
      for (const auto& [key, value] : values) node->attributes[key] = value;
    }
  }
  return graph;
}

}  // namespace b2v
