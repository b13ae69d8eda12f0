#pragma once

// Second-order biased random walks (node2vec).
//
// From `curr`, having arrived from `prev`, the unnormalized weight of moving to
// neighbor x is w(curr, x) scaled by 1/p when x == prev, by 1 when x is also a
// neighbor of prev, and by 1/q otherwise. The first step of a walk has no prev
// and is proportional to edge weight alone.
//
// generate_walks() runs walks in parallel with OpenMP; generate_walks_serial()
// is the single-threaded reference. Each walk draws from its own stream keyed
// by (seed, round, start node), so both produce the same corpus.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "b2v/graph.hpp"
#include "b2v/random.hpp"

namespace b2v {

struct WalkConfig {
  double p = 1.0;
  double q = 1.0;
  std::uint32_t walk_length = 80;
  std::uint32_t walks_per_node = 10;
  std::uint64_t seed = 42;
  /// Above this many directed-incidence table entries (sum of squared
  /// degrees) walks sample transitions by linear scan instead of alias tables.
  std::uint64_t alias_entry_cap = 50'000'000;

  /// Throws InvalidArgument when a bound is violated.
  void validate() const;
};

/// Compressed adjacency over dense node indices (ascending NodeId). Parallel
/// edges between the same pair are merged by summing their weights.
class WalkGraph {
 public:
  explicit WalkGraph(const PropertyGraph& graph);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<NodeId>& nodes() const { return nodes_; }
  std::optional<std::uint32_t> index_of(const NodeId& id) const;

  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<const double> weights(std::uint32_t v) const {
    return {weights_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(std::uint32_t v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t offset(std::uint32_t v) const { return offsets_[v]; }
  std::size_t directed_edge_count() const { return targets_.size(); }
  /// CSR position of the directed edge u -> v, if present.
  std::optional<std::size_t> edge_position(std::uint32_t u, std::uint32_t v) const;
  bool adjacent(std::uint32_t u, std::uint32_t v) const { return edge_position(u, v).has_value(); }

 private:
  std::vector<NodeId> nodes_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> targets_;
  std::vector<double> weights_;
};

inline constexpr std::uint32_t kNoPrev = UINT32_MAX;

/// Unnormalized transition weights out of `curr`, aligned with neighbors(curr).
void transition_weights(const WalkGraph& g, std::uint32_t prev, std::uint32_t curr, double p,
                        double q, std::vector<double>& out);

struct Transition {
  NodeId next;
  double probability = 0;
};

/// Normalized next-step distribution, neighbors in ascending NodeId. `prev`
/// empty means first step. Throws Errc::IsolatedNode when `curr` has no
/// neighbors and UnknownNode / InvalidArgument for bad ids.
std::vector<Transition> transition_distribution(const PropertyGraph& graph,
                                                std::optional<NodeId> prev, NodeId curr, double p,
                                                double q);

/// Alias tables for every first step (one per node) and every directed
/// incidence prev -> curr (one per CSR edge position, over curr's neighbors).
class AliasIndex {
 public:
  AliasIndex(const WalkGraph& g, double p, double q);

  struct View {
    std::span<const double> prob;
    std::span<const std::uint32_t> alias;
  };
  View first_step(std::uint32_t node) const;
  /// Table for a walk that arrived at the target of CSR edge `edge_pos`.
  View after_edge(std::size_t edge_pos, std::uint32_t curr) const;

  std::size_t entry_count() const { return edge_prob_.size(); }

 private:
  const WalkGraph* graph_;
  std::vector<double> node_prob_;
  std::vector<std::uint32_t> node_alias_;
  std::vector<std::size_t> edge_offsets_;  // per CSR edge position, into edge_prob_
  std::vector<double> edge_prob_;
  std::vector<std::uint32_t> edge_alias_;
};

struct WalkCorpus {
  std::vector<NodeId> vocabulary;                  // dense index -> node
  std::vector<std::vector<std::uint32_t>> walks;   // dense indices
  std::vector<std::uint64_t> counts;               // occurrences per dense index

  std::size_t token_count() const;
  bool operator==(const WalkCorpus&) const = default;
};

/// Parallel walk generation on `workers` OpenMP threads (0 = runtime default).
WalkCorpus generate_walks(const PropertyGraph& graph, const WalkConfig& cfg, int workers = 0);
/// Single-threaded reference.
WalkCorpus generate_walks_serial(const PropertyGraph& graph, const WalkConfig& cfg);

/// One walk per line, space-separated node ids.
std::string dump_walks(const WalkCorpus& corpus);

}  // namespace b2v
