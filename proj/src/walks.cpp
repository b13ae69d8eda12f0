#include "b2v/walks.hpp"

#include <algorithm>
#include <cmath>
#include <omp.h>
#include <sstream>

#include "b2v/alias.hpp"
#include "b2v/error.hpp"

namespace b2v {

void WalkConfig::validate() const {
  if (!(p > 0) || !std::isfinite(p)) throw Error(Errc::InvalidArgument, "p must be > 0");
  if (!(q > 0) || !std::isfinite(q)) throw Error(Errc::InvalidArgument, "q must be > 0");
  if (walk_length < 1) throw Error(Errc::InvalidArgument, "walk_length must be >= 1");
  if (walks_per_node < 1) throw Error(Errc::InvalidArgument, "walks_per_node must be >= 1");
}

WalkGraph::WalkGraph(const PropertyGraph& graph) {
  nodes_.reserve(graph.node_count());
  for (const auto& [id, node] : graph.nodes()) nodes_.push_back(id);
  offsets_.assign(nodes_.size() + 1, 0);

  std::vector<std::pair<std::uint32_t, double>> adj;
  for (std::uint32_t v = 0; v < nodes_.size(); ++v) {
    adj.clear();
    for (auto e : graph.incident(nodes_[v])) {
      const auto& edge = graph.edges()[e];
      adj.emplace_back(*index_of(edge.other(nodes_[v])), edge.weight);
    }
    std::sort(adj.begin(), adj.end());
    for (std::size_t i = 0; i < adj.size(); ++i) {
      if (!targets_.empty() && targets_.size() > offsets_[v] && targets_.back() == adj[i].first) {
        weights_.back() += adj[i].second;
      } else {
        targets_.push_back(adj[i].first);
        weights_.push_back(adj[i].second);
      }
    }
    offsets_[v + 1] = targets_.size();
  }
}

std::optional<std::uint32_t> WalkGraph::index_of(const NodeId& id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
  if (it == nodes_.end() || *it != id) return std::nullopt;
  return static_cast<std::uint32_t>(it - nodes_.begin());
}

std::optional<std::size_t> WalkGraph::edge_position(std::uint32_t u, std::uint32_t v) const {
  const auto nb = neighbors(u);
  auto it = std::lower_bound(nb.begin(), nb.end(), v);
  if (it == nb.end() || *it != v) return std::nullopt;
  return offsets_[u] + static_cast<std::size_t>(it - nb.begin());
}

void transition_weights(const WalkGraph& g, std::uint32_t prev, std::uint32_t curr, double p,
                        double q, std::vector<double>& out) {
  const auto nb = g.neighbors(curr);
  const auto w = g.weights(curr);
  out.resize(nb.size());
  if (prev == kNoPrev) {
    std::copy(w.begin(), w.end(), out.begin());
    return;
  }
  // Both neighbor lists are sorted, so membership is a merge.
  const auto prev_nb = g.neighbors(prev);
  std::size_t j = 0;
  for (std::size_t i = 0; i < nb.size(); ++i) {
    const auto x = nb[i];
    double bias;
    if (x == prev) {
      bias = 1.0 / p;
    } else {
      while (j < prev_nb.size() && prev_nb[j] < x) ++j;
      bias = (j < prev_nb.size() && prev_nb[j] == x) ? 1.0 : 1.0 / q;
    }
    out[i] = w[i] * bias;
  }
}

std::vector<Transition> transition_distribution(const PropertyGraph& graph,
                                                std::optional<NodeId> prev, NodeId curr, double p,
                                                double q) {
  if (!(p > 0) || !(q > 0)) throw Error(Errc::InvalidArgument, "p and q must be > 0");
  const WalkGraph g(graph);
  const auto c = g.index_of(curr);
  if (!c) throw Error(Errc::UnknownNode, "no node " + curr.str());
  if (g.degree(*c) == 0) throw Error(Errc::IsolatedNode, curr.str() + " has no neighbors");
  std::uint32_t pv = kNoPrev;
  if (prev) {
    const auto pi = g.index_of(*prev);
    if (!pi) throw Error(Errc::UnknownNode, "no node " + prev->str());
    if (!g.adjacent(*pi, *c)) {
      throw Error(Errc::InvalidArgument, prev->str() + " is not a neighbor of " + curr.str());
    }
    pv = *pi;
  }
  std::vector<double> w;
  transition_weights(g, pv, *c, p, q, w);
  double total = 0;
  for (double x : w) total += x;
  std::vector<Transition> out;
  const auto nb = g.neighbors(*c);
  for (std::size_t i = 0; i < nb.size(); ++i) out.push_back({g.nodes()[nb[i]], w[i] / total});
  return out;
}

AliasIndex::AliasIndex(const WalkGraph& g, double p, double q) : graph_(&g) {
  node_prob_.assign(g.directed_edge_count(), 0.0);
  node_alias_.assign(g.directed_edge_count(), 0);
  edge_offsets_.assign(g.directed_edge_count() + 1, 0);
  for (std::uint32_t u = 0; u < g.size(); ++u) {
    for (auto v : g.neighbors(u)) {
      const auto pos = *g.edge_position(u, v);
      edge_offsets_[pos + 1] = g.degree(v);
    }
  }
  for (std::size_t i = 0; i < g.directed_edge_count(); ++i) edge_offsets_[i + 1] += edge_offsets_[i];
  edge_prob_.assign(edge_offsets_.back(), 0.0);
  edge_alias_.assign(edge_offsets_.back(), 0);

  std::vector<double> w;
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    if (g.degree(v) == 0) continue;
    transition_weights(g, kNoPrev, v, p, q, w);
    const auto off = g.offset(v);
    build_alias(w, {node_prob_.data() + off, w.size()}, {node_alias_.data() + off, w.size()});
  }
  for (std::uint32_t u = 0; u < g.size(); ++u) {
    const auto nb = g.neighbors(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const auto pos = g.offset(u) + k;
      transition_weights(g, u, nb[k], p, q, w);
      const auto off = edge_offsets_[pos];
      build_alias(w, {edge_prob_.data() + off, w.size()}, {edge_alias_.data() + off, w.size()});
    }
  }
}

AliasIndex::View AliasIndex::first_step(std::uint32_t node) const {
  const auto off = graph_->offset(node);
  const auto n = graph_->degree(node);
  return {{node_prob_.data() + off, n}, {node_alias_.data() + off, n}};
}

AliasIndex::View AliasIndex::after_edge(std::size_t edge_pos, std::uint32_t curr) const {
  const auto off = edge_offsets_[edge_pos];
  const auto n = graph_->degree(curr);
  return {{edge_prob_.data() + off, n}, {edge_alias_.data() + off, n}};
}

std::size_t WalkCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& w : walks) n += w.size();
  return n;
}

namespace {

std::uint32_t linear_sample(const std::vector<double>& w, RandomStream& rng) {
  double total = 0;
  for (double x : w) total += x;
  const double target = rng.uniform() * total;
  double acc = 0;
  std::uint32_t last_positive = 0;
  for (std::uint32_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0) continue;
    acc += w[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

struct WalkPlan {
  const WalkGraph& graph;
  const AliasIndex* aliases;  // null: linear-scan fallback
  const WalkConfig& cfg;
  std::vector<std::uint32_t> starts;  // per walk slot
  std::vector<std::uint32_t> rounds;
};

void run_walk(const WalkPlan& plan, std::size_t slot, std::vector<std::uint32_t>& out,
              std::vector<double>& scratch) {
  const auto& g = plan.graph;
  const auto& cfg = plan.cfg;
  const auto start = plan.starts[slot];
  RandomStream rng{cfg.seed, static_cast<std::uint64_t>(StreamTag::Walk), plan.rounds[slot], start};
  out.clear();
  out.reserve(cfg.walk_length);
  out.push_back(start);
  if (cfg.walk_length < 2 || g.degree(start) == 0) return;

  std::uint32_t k;
  if (plan.aliases) {
    const auto view = plan.aliases->first_step(start);
    k = sample_alias(view.prob, view.alias, rng);
  } else {
    transition_weights(g, kNoPrev, start, cfg.p, cfg.q, scratch);
    k = linear_sample(scratch, rng);
  }
  out.push_back(g.neighbors(start)[k]);

  while (out.size() < cfg.walk_length) {
    const auto curr = out.back();
    const auto prev = out[out.size() - 2];
    if (plan.aliases) {
      const auto view = plan.aliases->after_edge(*g.edge_position(prev, curr), curr);
      k = sample_alias(view.prob, view.alias, rng);
    } else {
      transition_weights(g, prev, curr, cfg.p, cfg.q, scratch);
      k = linear_sample(scratch, rng);
    }
    out.push_back(g.neighbors(curr)[k]);
  }
}

WalkPlan make_plan(const WalkGraph& g, const AliasIndex* aliases, const WalkConfig& cfg) {
  WalkPlan plan{g, aliases, cfg, {}, {}};
  const auto n = static_cast<std::uint32_t>(g.size());
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t r = 0; r < cfg.walks_per_node; ++r) {
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    RandomStream rng{cfg.seed, static_cast<std::uint64_t>(StreamTag::WalkOrder), r};
    for (std::uint32_t i = n; i > 1; --i) {
      const auto j = static_cast<std::uint32_t>(rng.below(i));
      std::swap(order[i - 1], order[j]);
    }
    for (auto s : order) {
      plan.starts.push_back(s);
      plan.rounds.push_back(r);
    }
  }
  return plan;
}

bool use_alias_tables(const WalkGraph& g, const WalkConfig& cfg) {
  std::uint64_t entries = 0;
  for (std::uint32_t v = 0; v < g.size(); ++v) entries += g.degree(v) * g.degree(v);
  return entries <= cfg.alias_entry_cap;
}

WalkCorpus finish(const WalkGraph& g, std::vector<std::vector<std::uint32_t>> walks) {
  WalkCorpus corpus;
  corpus.vocabulary = g.nodes();
  corpus.counts.assign(g.size(), 0);
  for (const auto& w : walks) {
    for (auto v : w) ++corpus.counts[v];
  }
  corpus.walks = std::move(walks);
  return corpus;
}

}  // namespace

WalkCorpus generate_walks_serial(const PropertyGraph& graph, const WalkConfig& cfg) {
  cfg.validate();
  const WalkGraph g(graph);
  std::optional<AliasIndex> aliases;
  if (use_alias_tables(g, cfg)) aliases.emplace(g, cfg.p, cfg.q);
  const auto plan = make_plan(g, aliases ? &*aliases : nullptr, cfg);

  std::vector<std::vector<std::uint32_t>> walks(plan.starts.size());
  std::vector<double> scratch;
  for (std::size_t slot = 0; slot < walks.size(); ++slot) run_walk(plan, slot, walks[slot], scratch);
  return finish(g, std::move(walks));
}

WalkCorpus generate_walks(const PropertyGraph& graph, const WalkConfig& cfg, int workers) {
  cfg.validate();
  const WalkGraph g(graph);
  std::optional<AliasIndex> aliases;
  if (use_alias_tables(g, cfg)) aliases.emplace(g, cfg.p, cfg.q);
  const auto plan = make_plan(g, aliases ? &*aliases : nullptr, cfg);
  const int threads = workers > 0 ? workers : omp_get_max_threads();

  std::vector<std::vector<std::uint32_t>> walks(plan.starts.size());
  const auto total = static_cast<std::int64_t>(walks.size());
#pragma omp parallel num_threads(threads)
  {
    std::vector<double> scratch;
#pragma omp for schedule(dynamic, 32)
    for (std::int64_t slot = 0; slot < total; ++slot) {
      run_walk(plan, static_cast<std::size_t>(slot), walks[static_cast<std::size_t>(slot)], scratch);
    }
  }
  return finish(g, std::move(walks));
}

std::string dump_walks(const WalkCorpus& corpus) {
  std::ostringstream os;
  for (const auto& w : corpus.walks) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) os << ' ';
      os << corpus.vocabulary[w[i]].str();
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace b2v
