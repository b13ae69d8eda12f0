#include <cmath>
#include <map>
#include <random>

#include "b2v/alias.hpp"
#include "b2v/error.hpp"
#include "b2v/walks.hpp"
#include "doctest.h"
#include "fixture_graphs.hpp"
#include "oracles.hpp"

using namespace b2v;

using oracles::brute_force_transition;
using oracles::total_variation;

TEST_CASE("unbiased walk spreads evenly over neighbors") {
  const auto g = fixtures::from_edges(4, {{1, 2}, {1, 3}, {1, 4}});
  for (std::optional<NodeId> prev : {std::optional<NodeId>{}, std::optional(NodeId::ifc(2))}) {
    const auto d = transition_distribution(g, prev, NodeId::ifc(1), 1.0, 1.0);
    REQUIRE(d.size() == 3);
    for (const auto& t : d) CHECK(t.probability == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
}

TEST_CASE("return and in-out bias on the triangle and the path") {
  const auto tri = transition_distribution(fixtures::triangle(), NodeId::ifc(1), NodeId::ifc(2), 0.5, 2.0);
  REQUIRE(tri.size() == 2);
  CHECK(tri[0].next == NodeId::ifc(1));
  CHECK(std::abs(tri[0].probability - 2.0 / 3) < 1e-12);
  CHECK(std::abs(tri[1].probability - 1.0 / 3) < 1e-12);

  const auto path = transition_distribution(fixtures::path3(), NodeId::ifc(1), NodeId::ifc(2), 4.0, 0.25);
  REQUIRE(path.size() == 2);
  CHECK(std::abs(path[0].probability - 1.0 / 17) < 1e-12);
  CHECK(std::abs(path[1].probability - 16.0 / 17) < 1e-12);
}

TEST_CASE("transition_distribution error paths") {
  PropertyGraph g = fixtures::path3();
  g.add_node(NodeId::ifc(9), "N");
  CHECK_THROWS_AS(transition_distribution(g, std::nullopt, NodeId::ifc(9), 1, 1), Error);
  try {
    transition_distribution(g, std::nullopt, NodeId::ifc(9), 1, 1);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IsolatedNode);
  }
  CHECK_THROWS_AS(transition_distribution(g, NodeId::ifc(3), NodeId::ifc(1), 1, 1), Error);
  CHECK_THROWS_AS(transition_distribution(g, std::nullopt, NodeId::ifc(42), 1, 1), Error);
}

TEST_CASE("transition_distribution matches the brute-force rule on small graphs") {
  const std::vector<std::pair<double, double>> pqs{{1, 1}, {0.5, 2}, {4, 0.25}, {0.3, 0.7}};
  for (const auto& g : fixtures::small_graphs()) {
    for (const auto& [p, q] : pqs) {
      for (const auto& [curr, cn] : g.nodes()) {
        if (g.incident(curr).empty()) continue;
        std::vector<std::optional<NodeId>> prevs{std::nullopt};
        for (auto e : g.incident(curr)) prevs.push_back(g.edges()[e].other(curr));
        for (const auto& prev : prevs) {
          const auto got = transition_distribution(g, prev, curr, p, q);
          const auto want = brute_force_transition(g, prev, curr, p, q);
          REQUIRE(got.size() == want.size());
          double sum = 0;
          for (const auto& t : got) {
            CHECK(std::abs(t.probability - want.at(t.next)) < 1e-12);
            sum += t.probability;
          }
          CHECK(std::abs(sum - 1.0) < 1e-12);
          for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1].next < got[i].next);
        }
      }
    }
  }
}

TEST_CASE("p = q = 1 reduces to a first-order weighted walk") {
  for (const auto& g : fixtures::small_graphs()) {
    for (const auto& [curr, cn] : g.nodes()) {
      if (g.incident(curr).empty()) continue;
      const auto first = transition_distribution(g, std::nullopt, curr, 1, 1);
      for (auto e : g.incident(curr)) {
        const auto d = transition_distribution(g, g.edges()[e].other(curr), curr, 1, 1);
        for (std::size_t i = 0; i < d.size(); ++i) {
          CHECK(std::abs(d[i].probability - first[i].probability) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("alias tables reconstruct their input") {
  const std::vector<double> quarter{0.25, 0.75};
  AliasTable t(quarter);
  CHECK(t.distribution() == quarter);

  const std::vector<double> uniform(4, 0.25);
  AliasTable u(uniform);
  for (double p : u.prob()) CHECK(p == 1.0);

  const std::vector<double> single{1.0};
  AliasTable s(single);
  CHECK(s.size() == 1);
  RandomStream rng(3);
  CHECK(s.sample(rng) == 0);

  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> w(1 + gen() % 16);
    double total = 0;
    for (auto& x : w) {
      x = static_cast<double>(gen() % 1000);
      total += x;
    }
    if (total == 0) w[0] = total = 1;
    const auto d = AliasTable(w).distribution();
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(d[i] - w[i] / total) < 1e-12);
  }

  CHECK_THROWS_AS(AliasTable(std::vector<double>{0.0, 0.0}), Error);
  CHECK_THROWS_AS(AliasTable(std::vector<double>{}), Error);
  CHECK_THROWS_AS(AliasTable(std::vector<double>{1.0, -1.0}), Error);
}

TEST_CASE("precomputed tables equal transition_distribution") {
  for (const auto& pg : fixtures::small_graphs()) {
    const WalkGraph g(pg);
    const double p = 0.5, q = 3.0;
    const AliasIndex index(g, p, q);
    for (std::uint32_t v = 0; v < g.size(); ++v) {
      if (g.degree(v) == 0) continue;
      const auto first = index.first_step(v);
      const auto want_first = transition_distribution(pg, std::nullopt, g.nodes()[v], p, q);
      const auto got_first = alias_distribution(first.prob, first.alias);
      for (std::size_t i = 0; i < got_first.size(); ++i) {
        CHECK(std::abs(got_first[i] - want_first[i].probability) < 1e-12);
      }
      for (auto u : g.neighbors(v)) {
        const auto view = index.after_edge(*g.edge_position(u, v), v);
        const auto got = alias_distribution(view.prob, view.alias);
        const auto want = transition_distribution(pg, g.nodes()[u], g.nodes()[v], p, q);
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i].probability) < 1e-12);
      }
    }
  }
}

TEST_CASE("walk edge cases") {
  PropertyGraph lone;
  lone.add_node(NodeId::ifc(1), "N");
  WalkConfig cfg;
  cfg.walks_per_node = 2;
  const auto c = generate_walks_serial(lone, cfg);
  REQUIRE(c.walks.size() == 2);
  for (const auto& w : c.walks) CHECK(w == std::vector<std::uint32_t>{0});

  const auto pair = fixtures::from_edges(2, {{1, 2}});
  cfg.walk_length = 3;
  for (const auto& w : generate_walks_serial(pair, cfg).walks) {
    CHECK((w == std::vector<std::uint32_t>{0, 1, 0} || w == std::vector<std::uint32_t>{1, 0, 1}));
  }

  cfg.walk_length = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.walk_length = 5;
  cfg.p = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("empirical next-step frequencies on the triangle") {
  // Walks of length 3 from node 1 whose first step went to 2 sample b's
  // out-distribution given prev = 1.
  WalkConfig cfg;
  cfg.p = 0.5;
  cfg.q = 2.0;
  cfg.walk_length = 3;
  cfg.walks_per_node = 100000;
  cfg.seed = 17;
  const auto corpus = generate_walks(fixtures::triangle(), cfg, 2);
  std::size_t total = 0, back = 0;
  for (const auto& w : corpus.walks) {
    if (w[0] == 0 && w[1] == 1) {
      ++total;
      back += w[2] == 0;
    }
  }
  REQUIRE(total > 20000);
  CHECK(std::abs(static_cast<double>(back) / total - 2.0 / 3) < 0.01);
}

TEST_CASE("alias sampling matches transitions within TV 0.02 on fixture graphs") {
  for (const auto& pg : fixtures::small_graphs()) {
    const WalkGraph g(pg);
    const AliasIndex index(g, 2.0, 0.5);
    RandomStream rng(99);
    for (std::uint32_t v = 0; v < g.size(); ++v) {
      for (auto u : g.neighbors(v)) {
        const auto view = index.after_edge(*g.edge_position(u, v), v);
        std::vector<double> freq(view.prob.size(), 0.0);
        const int draws = 100000;
        for (int i = 0; i < draws; ++i) freq[sample_alias(view.prob, view.alias, rng)] += 1.0 / draws;
        std::vector<double> want;
        for (const auto& t : transition_distribution(pg, g.nodes()[u], g.nodes()[v], 2.0, 0.5)) {
          want.push_back(t.probability);
        }
        CHECK(total_variation(freq, want) < 0.02);
      }
    }
  }
}

TEST_CASE("corpus properties and serial/parallel agreement") {
  WalkConfig cfg;
  cfg.walk_length = 20;
  cfg.walks_per_node = 4;
  cfg.p = 0.7;
  cfg.q = 1.9;
  for (const auto& g : fixtures::small_graphs()) {
    const auto serial = generate_walks_serial(g, cfg);
    CHECK(serial.walks.size() == g.node_count() * cfg.walks_per_node);
    for (int workers : {1, 2, 3, 4}) CHECK(generate_walks(g, cfg, workers) == serial);
    const WalkGraph wg(g);
    for (const auto& w : serial.walks) {
      CHECK(w.size() <= cfg.walk_length);
      for (std::size_t i = 1; i < w.size(); ++i) CHECK(wg.adjacent(w[i - 1], w[i]));
    }
    for (std::size_t i = 0; i < serial.vocabulary.size(); ++i) {
      CHECK(g.contains(serial.vocabulary[i]));
      CHECK(serial.counts[i] >= 1);
    }
    CHECK(dump_walks(generate_walks(g, cfg, 2)) == dump_walks(serial));
  }
}

TEST_CASE("linear-scan fallback samples the same distribution") {
  WalkConfig cfg;
  cfg.p = 0.5;
  cfg.q = 2.0;
  cfg.walk_length = 3;
  cfg.walks_per_node = 60000;
  cfg.alias_entry_cap = 0;
  const auto corpus = generate_walks_serial(fixtures::triangle(), cfg);
  std::size_t total = 0, back = 0;
  for (const auto& w : corpus.walks) {
    if (w[0] == 0 && w[1] == 1) {
      ++total;
      back += w[2] == 0;
    }
  }
  CHECK(std::abs(static_cast<double>(back) / total - 2.0 / 3) < 0.01);
  CHECK(generate_walks(fixtures::triangle(), cfg, 3) == corpus);
}

TEST_CASE("different seeds give different corpora") {
  WalkConfig a;
  a.walk_length = 10;
  WalkConfig b = a;
  b.seed = a.seed + 1;
  CHECK_FALSE(generate_walks_serial(fixtures::barbell(), a) == generate_walks_serial(fixtures::barbell(), b));
}
