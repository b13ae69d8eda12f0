#include <sstream>

#include "b2v/error.hpp"
#include "b2v/graph.hpp"
#include "b2v/ifc_graph.hpp"
#include "b2v/step.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace b2v;

namespace {

std::string wrap_data(const std::string& records) {
  return "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\n" + records + "\nENDSEC;\nEND-ISO-10303-21;\n";
}

// Pairs a relationship rule would expand to, counted straight off the model.
std::size_t count_expected_edges(const step::StepModel& model, const RelationMapping& mapping) {
  std::size_t n = 0;
  for (const auto& [id, e] : model.entities()) {
    const RelationRule* rule = nullptr;
    for (const auto& r : mapping.rules) {
      if (r.type_name == e.type_name) rule = &r;
    }
    if (!rule) continue;
    std::vector<step::EntityId> from;
    std::vector<step::EntityId> to;
    step::collect_references(e.attributes.at(rule->relating_attr), from);
    step::collect_references(e.attributes.at(rule->related_attr), to);
    const auto is_node = [&](step::EntityId x) {
      const auto* ent = model.find(x);
      return ent && mapping.is_object(ent->type_name);
    };
    for (auto a : from) {
      for (auto b : to) {
        if (a != b && is_node(a) && is_node(b)) ++n;
      }
    }
  }
  return n;
}

}  // namespace

TEST_CASE("node ids print and parse") {
  CHECK(NodeId::ifc(12).str() == "ifc:12");
  CHECK(NodeId::cell(5, 0, 1).str() == "cell:5:0:1");
  CHECK(NodeId::parse("cell:5:0:1") == NodeId::cell(5, 0, 1));
  CHECK(NodeId::parse("42") == NodeId::ifc(42));
  CHECK(NodeId::parse("occ:3") == NodeId::occupant(3));
  CHECK(NodeId::parse("sensor:0") == NodeId::sensor(0));
  CHECK_FALSE(NodeId::try_parse("wall:1"));
  CHECK_FALSE(NodeId::try_parse("ifc:0"));
  CHECK_FALSE(NodeId::try_parse("cell:1:70000:0"));
  CHECK(NodeId::ifc(9) < NodeId::ifc(10));
  CHECK(NodeId::ifc(1000) < NodeId::cell(1, 0, 0));
  CHECK_THROWS_AS(NodeId::cell(1, 1u << 16, 0), Error);
}

TEST_CASE("edges reject self-loops, missing endpoints and bad weights") {
  PropertyGraph g;
  g.add_node(NodeId::ifc(1), "A");
  g.add_node(NodeId::ifc(2), "A");
  CHECK_THROWS_AS(g.add_edge(NodeId::ifc(1), NodeId::ifc(1), "X"), Error);
  CHECK_THROWS_AS(g.add_edge(NodeId::ifc(1), NodeId::ifc(3), "X"), Error);
  CHECK_THROWS_AS(g.add_edge(NodeId::ifc(1), NodeId::ifc(2), "X", 0.0), Error);
  CHECK_THROWS_AS(g.add_edge(NodeId::ifc(1), NodeId::ifc(2), "X", -1.0), Error);
  CHECK_THROWS_AS(g.add_node(NodeId::ifc(1), "B"), Error);
  g.add_edge(NodeId::ifc(2), NodeId::ifc(1), "X", 2.5);
  CHECK(g.edges()[0].a == NodeId::ifc(1));
  CHECK(g.has_edge(NodeId::ifc(2), NodeId::ifc(1), "X"));
  CHECK(g.incidence_consistent());
}

TEST_CASE("graph text form reads back losslessly") {
  PropertyGraph g;
  g.add_node(NodeId::ifc(5), "IFCSPACE",
             {{"Name", std::string("Room\tA \"quoted\"")}, {"area", 12.5}, {"n", std::int64_t{3}},
              {"ok", true}, {"feedback", std::vector<double>{0, 1, 0}}});
  g.add_node(NodeId::cell(5, 0, 1), "CELL", {{"w", 1.0}});
  g.add_edge(NodeId::ifc(5), NodeId::cell(5, 0, 1), "PART_OF", 0.1, {{"why", std::string("x")}});
  const auto text = write_graph(g);
  const auto back = read_graph_text(text);
  CHECK(back == g);
  CHECK(write_graph(back) == text);
  // integer vs real attribute types survive
  CHECK(std::holds_alternative<double>(back.node(NodeId::cell(5, 0, 1)).attributes.at("w")));
  CHECK(std::holds_alternative<std::int64_t>(back.node(NodeId::ifc(5)).attributes.at("n")));
  CHECK_THROWS_AS(read_graph_text("N\tifc:1\tA\n"), Error);
  CHECK_THROWS_AS(read_graph_text("E\tifc:1\tifc:2\tX\t1\t{}\n"), Error);
}

TEST_CASE("subgraph keeps induced edges only") {
  PropertyGraph g;
  g.add_node(NodeId::ifc(1), "A");
  g.add_node(NodeId::ifc(2), "A");
  g.add_node(NodeId::ifc(3), "B");
  g.add_edge(NodeId::ifc(1), NodeId::ifc(2), "E");
  g.add_edge(NodeId::ifc(2), NodeId::ifc(3), "E");
  g.add_edge(NodeId::ifc(1), NodeId::ifc(3), "E");
  const auto only_a = subgraph(g, {"A"});
  CHECK(only_a.node_count() == 2);
  REQUIRE(only_a.edge_count() == 1);
  CHECK(only_a.edges()[0].a == NodeId::ifc(1));
  CHECK(only_a.edges()[0].b == NodeId::ifc(2));
  CHECK(subgraph(g, g.labels()) == g);
  CHECK(subgraph(g, {"C"}).node_count() == 0);
}

TEST_CASE("build_graph expands containment") {
  const auto m = step::parse_step(wrap_data(
      "#5=IFCSPACE('s',$,'Room',$,$,$,$,$,.ELEMENT.,.INTERNAL.,$);\n"
      "#6=IFCWALL('w',$,'Wall',$,$,$,$,$);\n"
      "#10=IFCRELCONTAINEDINSPATIALSTRUCTURE('r',$,$,$,(#6),#5);"));
  const auto g = build_graph(m, RelationMapping::defaults());
  CHECK(g.node_count() == 2);
  REQUIRE(g.edge_count() == 1);
  const auto& e = g.edges()[0];
  CHECK(e.a == NodeId::ifc(5));
  CHECK(e.b == NodeId::ifc(6));
  CHECK(e.label == "CONTAINS");
  CHECK(e.weight == 1.0);
  CHECK(g.node(NodeId::ifc(6)).attributes.at("Name") == AttrValue{std::string("Wall")});
}

TEST_CASE("build_graph without relationships has no edges") {
  const auto m = step::parse_step(wrap_data("#5=IFCSPACE('s',$,$,$,$,$,$,$,$,$,$);\n#6=IFCDOOR();"));
  const auto g = build_graph(m, RelationMapping::defaults());
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("build_graph expands aggregation to every related object") {
  const auto m = step::parse_step(wrap_data(
      "#3=IFCBUILDINGSTOREY('st',$,$,$,$,$,$,$,.ELEMENT.,0.);\n"
      "#5=IFCSPACE('a',$,$,$,$,$,$,$,$,$,$);\n#7=IFCSPACE('b',$,$,$,$,$,$,$,$,$,$);\n"
      "#9=IFCRELAGGREGATES('r',$,$,$,#3,(#5,#7));"));
  const auto g = build_graph(m, RelationMapping::defaults());
  REQUIRE(g.edge_count() == 2);
  CHECK(g.has_edge(NodeId::ifc(3), NodeId::ifc(5), "AGGREGATES"));
  CHECK(g.has_edge(NodeId::ifc(3), NodeId::ifc(7), "AGGREGATES"));
}

TEST_CASE("dangling relationships: lenient skips, strict throws") {
  const auto m = step::parse_step_file(fixture_path("dangling.ifc"));
  BuildReport rep;
  const auto g = build_graph(m, RelationMapping::defaults(), false, &rep);
  CHECK(g.edge_count() == 2);
  CHECK(rep.dangling == std::vector<DanglingPair>{{11, 9}, {12, 9}, {12, 8}});
  CHECK_THROWS_AS(build_graph(m, RelationMapping::defaults(), true), Error);
  try {
    build_graph(m, RelationMapping::defaults(), true);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DanglingReference);
  }
}

TEST_CASE("two-space fixture: edge count matches an independent pass") {
  const auto m = step::parse_step_file(fixture_path("two_space.ifc"));
  const auto mapping = RelationMapping::defaults();
  BuildReport rep;
  const auto g = build_graph(m, mapping, true, &rep);
  CHECK(g.node_count() == 19);
  CHECK(g.edge_count() == count_expected_edges(m, mapping));
  CHECK(g.edge_count() == 36);
  CHECK(rep.skipped_non_object == 1);
  CHECK_FALSE(g.contains(NodeId::ifc(700)));  // type objects are not nodes
  CHECK_FALSE(g.contains(NodeId::ifc(1010)));  // relationships are not nodes
  CHECK(g.incidence_consistent());
  for (const auto& e : g.edges()) {
    CHECK(g.contains(e.a));
    CHECK(g.contains(e.b));
  }
  CHECK(write_graph(build_graph(m, mapping)) == write_graph(g));
}

TEST_CASE("attach_properties copies single values") {
  const auto m = step::parse_step_file(fixture_path("two_space.ifc"));
  auto g = attach_properties(build_graph(m, RelationMapping::defaults()), m);
  const auto& wall = g.node(NodeId::ifc(300)).attributes;
  CHECK(wall.at("IsExternal") == AttrValue{true});
  CHECK(wall.at("Height") == AttrValue{3.0});
  CHECK(wall.at("Reference") == AttrValue{std::string("W-EXT")});
  CHECK(g.node(NodeId::ifc(301)).attributes.at("IsExternal") == AttrValue{false});
  CHECK(g.node(NodeId::ifc(100)).attributes.at("NetFloorArea") == AttrValue{12.0});
}

TEST_CASE("attach_properties: later relationship wins, none leaves graph unchanged") {
  const std::string base =
      "#6=IFCWALL('w',$,$,$,$,$,$,$);\n"
      "#30=IFCPROPERTYSINGLEVALUE('Height',$,IFCLENGTHMEASURE(2.5),$);\n"
      "#31=IFCPROPERTYSINGLEVALUE('Height',$,IFCLENGTHMEASURE(4.0),$);\n"
      "#40=IFCPROPERTYSET('p',$,'A',$,(#30));\n#41=IFCPROPERTYSET('q',$,'B',$,(#31));\n";
  const auto m = step::parse_step(wrap_data(base +
                                            "#21=IFCRELDEFINESBYPROPERTIES('r',$,$,$,(#6),#41);\n"
                                            "#20=IFCRELDEFINESBYPROPERTIES('r',$,$,$,(#6),#40);"));
  const auto g = attach_properties(build_graph(m, RelationMapping::defaults()), m);
  CHECK(g.node(NodeId::ifc(6)).attributes.at("Height") == AttrValue{4.0});

  const auto plain = step::parse_step(wrap_data(base));
  const auto g0 = build_graph(plain, RelationMapping::defaults());
  CHECK(attach_properties(g0, plain) == g0);

  Diagnostics diag;
  const auto bad = step::parse_step(
      wrap_data("#6=IFCWALL();\n#20=IFCRELDEFINESBYPROPERTIES('r',$,$,$,(#6),#6);"));
  attach_properties(build_graph(bad, RelationMapping::defaults()), bad, &diag);
  CHECK(diag.size() == 1);
}
