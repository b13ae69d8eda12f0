// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "b2v/alias.hpp"
#include "b2v/embedding.hpp"
#include "b2v/error.hpp"
#include "b2v/pipeline.hpp"
#include "b2v/sgns.hpp"
#include "b2v/step.hpp"
#include "b2v/temporal.hpp"
#include "b2v/text.hpp"
#include "b2v/walks.hpp"
#include "community.hpp"
#include "fixture_graphs.hpp"
#include "oracles.hpp"
#include "temporal_fixture.hpp"
#include "test_support.hpp"

#ifndef B2V_CLI_PATH
#error "B2V_CLI_PATH must be defined"
#endif

using namespace b2v;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// 1. transition_distribution against the brute-force p/q rule.
Outcome transition_oracle() {
  const std::vector<std::pair<double, double>> pqs{{1, 1}, {0.5, 2}, {4, 0.25}, {0.3, 0.7}, {2, 2}};
  double worst = 0;
  std::size_t cases = 0;
  for (const auto& g : fixtures::small_graphs()) {
    if (g.node_count() > 8) continue;
    for (const auto& [p, q] : pqs) {
      for (const auto& [curr, cn] : g.nodes()) {
        if (g.incident(curr).empty()) continue;
        std::vector<std::optional<NodeId>> prevs{std::nullopt};
        for (auto e : g.incident(curr)) prevs.push_back(g.edges()[e].other(curr));
        for (const auto& prev : prevs) {
          const auto got = transition_distribution(g, prev, curr, p, q);
          const auto want = oracles::brute_force_transition(g, prev, curr, p, q);
          if (got.size() != want.size()) return {false, "support mismatch at " + curr.str()};
          for (const auto& t : got) worst = std::max(worst, std::abs(t.probability - want.at(t.next)));
          ++cases;
        }
      }
    }
  }
  std::ostringstream os;
  os << cases << " (prev,curr,p,q) cases, max abs diff " << worst << " (tol 1e-12)";
  return {worst <= 1e-12, os.str()};
}

// 2. Alias sampling against exact distributions.
Outcome alias_fidelity() {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int d = 0; d < 20; ++d) {
    const std::size_t size = 1 + gen() % 16;
    std::vector<double> w(size);
    for (auto& x : w) x = u(gen) < 0.15 ? 0.0 : u(gen) * 10;
    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0; })) w[0] = 1;
    double total = 0;
    for (double x : w) total += x;
    std::vector<double> exact(size);
    for (std::size_t i = 0; i < size; ++i) exact[i] = w[i] / total;

    const AliasTable table(w);
    RandomStream rng{7, static_cast<std::uint64_t>(d)};
    std::vector<double> freq(size, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) freq[table.sample(rng)] += 1.0 / draws;
    worst = std::max(worst, oracles::total_variation(freq, exact));
  }
  std::ostringstream os;
  os << "20 distributions, 1e5 draws each, max TV " << worst << " (tol 0.02)";
  return {worst <= 0.02, os.str()};
}

// 3. SGNS gradients against central differences.
Outcome gradient_check() {
  const std::size_t n = 8, negatives = 5;
  const double h = 1e-4;
  std::mt19937_64 gen(99);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto t = oracles::random_triple(gen, n, negatives);
    std::vector<std::span<const double>> negs(t.neg.begin(), t.neg.end());
    std::vector<double> gv(n), guo(n);
    std::vector<std::vector<double>> gn(negatives, std::vector<double>(n));
    std::vector<std::span<double>> gneg(gn.begin(), gn.end());
    sgns_gradient<double>(t.v, t.uo, negs, gv, guo, gneg);
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, oracles::rel_err(gv[i], oracles::numeric_partial(t, t.v[i], h)));
      worst = std::max(worst, oracles::rel_err(guo[i], oracles::numeric_partial(t, t.uo[i], h)));
      for (std::size_t k = 0; k < negatives; ++k) {
        worst = std::max(worst, oracles::rel_err(gn[k][i], oracles::numeric_partial(t, t.neg[k][i], h)));
      }
    }
  }
  std::ostringstream os;
  os << "100 triples at n=8, max relative error " << worst << " (tol 1e-4)";
  return {worst < 1e-4, os.str()};
}

// 4. Community structure over 100 seeds on two fixtures.
int separated_runs(const PropertyGraph& graph, const std::vector<std::vector<NodeId>>& groups) {
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    WalkConfig wc;
    wc.seed = seed;
    TrainConfig tc;
    tc.dimension = 16;
    tc.seed = seed;
    tc.deterministic = true;
    const auto emb = train(generate_walks(graph, wc, 1), tc);
    ok += group_separation(emb, groups).separated();
  }
  return ok;
}

Outcome community_structure() {
  const auto start = Clock::now();
  std::vector<std::vector<NodeId>> barbell_groups(2);
  for (std::uint32_t i = 1; i <= 10; ++i) barbell_groups[i <= 5 ? 0 : 1].push_back(NodeId::ifc(i));
  const int barbell = separated_runs(fixtures::barbell(), barbell_groups);

  RunConfig cfg;
  cfg.ifc = fixture_path("two_space.ifc").string();
  cfg.footprints = fixture_path("two_space_footprints.json").string();
  cfg.sensors = fixture_path("two_space_sensors.csv").string();
  const auto building = build_building_graph(cfg);
  // Group cells by the space they were cut from.
  std::vector<std::vector<NodeId>> space_groups;
  for (const auto& space : building.spaces) {
    space_groups.emplace_back();
    for (const auto& c : space.cells) space_groups.back().push_back(c.id);
  }
  bool shape_ok = space_groups.size() == 2;
  for (const auto& g : space_groups) shape_ok = shape_ok && g.size() >= 9;
  std::size_t anchors = 0;
  for (const auto& e : building.graph.edges()) {
    const auto& a = building.graph.node(e.a).label;
    const auto& b = building.graph.node(e.b).label;
    if (e.label == kEdgeAt && (a == "IFCDOOR" || b == "IFCDOOR" || a == "IFCWINDOW" || b == "IFCWINDOW")) ++anchors;
  }
  shape_ok = shape_ok && anchors > 0;
  const int two_space = separated_runs(building.graph, space_groups);
  const double elapsed = seconds_since(start);

  std::ostringstream os;
  os << "barbell " << barbell << "/100, two-space cells " << two_space << "/100 (need >=95 each, dimension 16), "
     << elapsed << " s (limit 300)";
  if (!shape_ok) os << ", fixture shape wrong";
  return {shape_ok && barbell >= 95 && two_space >= 95 && elapsed <= 300, os.str()};
}

// 5. Occupant-move tensor and union weights.
Outcome temporal_correctness() {
  const auto f = fixtures::occupant_move();
  const auto tg = build_snapshots(f.base, f.spaces, {}, f.fixes, f.cfg);
  const auto tensor = adjacency_tensor(tg);

  // Dense order: ifc:100=0, cell:100:0:0..3 = 1..4, occ:1=5. Built by hand.
  std::vector<TensorRecord> expected;
  for (std::uint32_t t : {0u, 1u}) {
    expected.push_back({t, 0, 1, 1.0});
    expected.push_back({t, 0, 2, 1.0});
    expected.push_back({t, 0, 3, 1.0});
    expected.push_back({t, 0, 4, 1.0});
    expected.push_back({t, 1, 2, 1.0});
    if (t == 0) expected.push_back({t, 1, 5, 1.0});
    expected.push_back({t, 2, 3, 1.0});
    expected.push_back({t, 3, 4, 1.0});
    if (t == 1) expected.push_back({t, 4, 5, 1.0});
  }
  const bool tensor_ok = tensor.T == 2 && tensor.N == 6 && tensor.records == expected;

  const auto u = flatten(tg, FlattenMode::all());
  std::size_t at_edges = 0;
  bool weights_ok = true;
  for (const auto& e : u.edges()) {
    if (e.label != kEdgeAt) continue;
    ++at_edges;
    weights_ok = weights_ok && e.weight == 0.5;
  }
  weights_ok = weights_ok && at_edges == 2 && u.has_edge(NodeId::occupant(1), NodeId::cell(100, 0, 0), kEdgeAt) &&
               u.has_edge(NodeId::occupant(1), NodeId::cell(100, 0, 3), kEdgeAt);
  std::ostringstream os;
  os << "tensor " << (tensor_ok ? "matches" : "differs from") << " the " << expected.size()
     << " expected records; union AT edges " << at_edges << (weights_ok ? " at weight 0.5" : " with wrong weights");
  return {tensor_ok && weights_ok, os.str()};
}

// 6. One-hot contract.
Outcome one_hot_contract() {
  std::mt19937_64 gen(6);
  int trials = 0, good = 0;
  for (; trials < 1000; ++trials) {
    const auto emb = oracles::random_matrix(gen, 2 + gen() % 30, 1 + static_cast<std::uint32_t>(gen() % 8));
    std::vector<LabeledExample> labels;
    const auto count = 1 + gen() % emb.size();
    for (std::size_t i = 0; i < count; ++i) {
      labels.push_back({emb.vocabulary()[gen() % emb.size()], static_cast<Comfort>(gen() % 3)});
    }
    good += oracles::is_one_hot(predict_comfort(emb, labels, emb.vocabulary()[gen() % emb.size()], 1 + gen() % 9));
  }
  // Three nearest neighbors: two comfortable, one neutral.
  const auto emb = oracles::from_rows({{1, 0}, {1, 0.1f}, {1, 0.2f}, {1, 0.3f}, {-1, 0}});
  const std::vector<LabeledExample> labels{{NodeId::ifc(2), Comfort::Comfortable},
                                           {NodeId::ifc(3), Comfort::Comfortable},
                                           {NodeId::ifc(4), Comfort::Neutral},
                                           {NodeId::ifc(5), Comfort::Uncomfortable}};
  const auto majority = predict_comfort(emb, labels, NodeId::ifc(1), 3);
  const bool majority_ok = majority == OneHot{1, 0, 0};
  std::ostringstream os;
  os << good << "/" << trials << " one-hot outputs; majority example [" << majority[0] << "," << majority[1] << ","
     << majority[2] << "]";
  return {good == trials && majority_ok, os.str()};
}

// 7. STEP round trip and dangling references.
Outcome parser_round_trip() {
  std::size_t files = 0;
  for (const auto& path : step_fixtures()) {
    const auto text = read_file(path);
    const auto model = step::parse_step(text);
    if (model.size() != count_step_records(text)) return {false, path.filename().string() + ": record count"};
    const auto again = step::parse_step(step::write_step(model));
    if (!(again.entities() == model.entities()) || !(again.header() == model.header())) {
      return {false, path.filename().string() + ": round trip differs"};
    }
    ++files;
  }
  const auto dangling = step::validate_references(step::parse_step_file(fixture_path("dangling.ifc")));
  const bool dangling_ok = dangling == std::vector<step::DanglingRef>{{11, 9}, {12, 9}, {12, 8}};
  std::ostringstream os;
  os << files << " fixtures round-trip; dangling pairs";
  for (const auto& d : dangling) os << " (" << d.from << "," << d.missing << ")";
  return {files > 0 && dangling_ok, os.str()};
}

// 8. cmd_embed byte reproducibility.
int run_cli(const std::string& args) {
  const std::string cmd = std::string("BUILD2VEC_LOG=error ") + B2V_CLI_PATH + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome embed_determinism() {
  const auto dir = fs::temp_directory_path() / "b2v_acceptance_embed";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto graph = dir / "graph.txt";
  if (run_cli("graph --ifc " + fixture_path("two_space.ifc").string() + " --footprints " +
              fixture_path("two_space_footprints.json").string() + " --sensors " +
              fixture_path("two_space_sensors.csv").string() + " --out " + graph.string()) != 0) {
    return {false, "graph command failed"};
  }
  const auto embed = [&](const std::string& name, int workers) {
    return run_cli("embed --graph " + graph.string() + " --out " + (dir / name).string() +
                   " --dimension 16 --epochs 2 --deterministic true --workers " + std::to_string(workers));
  };
  if (embed("a.ckpt", 1) != 0 || embed("b.ckpt", 1) != 0 || embed("c.ckpt", 2) != 0 || embed("d.ckpt", 4) != 0) {
    return {false, "embed command failed"};
  }
  const auto a = read_file(dir / "a.ckpt");
  const bool runs = a == read_file(dir / "b.ckpt");
  const bool workers = a == read_file(dir / "c.ckpt") && a == read_file(dir / "d.ckpt");
  std::ostringstream os;
  os << "two runs " << (runs ? "identical" : "differ") << "; workers 1/2/4 " << (workers ? "identical" : "differ")
     << " (" << a.size() << " bytes)";
  return {runs && workers, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"transition oracle equivalence", transition_oracle},
      {"alias sampling fidelity", alias_fidelity},
      {"SGNS gradient check", gradient_check},
      {"community structure", community_structure},
      {"temporal correctness", temporal_correctness},
      {"one-hot contract", one_hot_contract},
      {"parser round trip", parser_round_trip},
      {"end-to-end determinism", embed_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << i + 1 << " " << criteria[i].first << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
