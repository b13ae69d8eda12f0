#pragma once

// Reference computations shared by the unit tests and the acceptance binary.
// Each is written from the definition, not from the library code.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "b2v/embedding.hpp"
#include "b2v/graph.hpp"

namespace oracles {

using b2v::NodeId;

// Bias rule evaluated straight from the edge list.
inline std::map<NodeId, double> brute_force_transition(const b2v::PropertyGraph& g, std::optional<NodeId> prev,
                                                       NodeId curr, double p, double q) {
  const auto weight_between = [&](NodeId a, NodeId b) {
    double w = 0;
    for (const auto& e : g.edges()) {
      if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) w += e.weight;
    }
    return w;
  };
  std::map<NodeId, double> out;
  double total = 0;
  for (const auto& [x, node] : g.nodes()) {
    const double w = weight_between(curr, x);
    if (w == 0) continue;
    double bias = 1.0;
    if (prev) {
      if (x == *prev) {
        bias = 1.0 / p;
      } else if (weight_between(*prev, x) > 0) {
        bias = 1.0;
      } else {
        bias = 1.0 / q;
      }
    }
    out[x] = w * bias;
    total += w * bias;
  }
  for (auto& [x, v] : out) v /= total;
  return out;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / 2;
}

struct Triple {
  std::vector<double> v, uo;
  std::vector<std::vector<double>> neg;
};

inline Triple random_triple(std::mt19937_64& gen, std::size_t n, std::size_t negatives) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Triple t;
  const auto fill = [&](std::vector<double>& x) {
    x.resize(n);
    for (auto& e : x) e = u(gen);
  };
  fill(t.v);
  fill(t.uo);
  t.neg.resize(negatives);
  for (auto& x : t.neg) fill(x);
  return t;
}

// SGNS loss written out term by term.
inline double reference_loss(const Triple& t) {
  const auto d = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  double loss = -std::log(1.0 / (1.0 + std::exp(-d(t.uo, t.v))));
  for (const auto& u : t.neg) loss -= std::log(1.0 / (1.0 + std::exp(d(u, t.v))));
  return loss;
}

inline double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-6});
  return std::abs(a - b) / scale;
}

/// Central difference of reference_loss with respect to one coordinate.
inline double numeric_partial(Triple& t, double& x, double h) {
  const double saved = x;
  x = saved + h;
  const double up = reference_loss(t);
  x = saved - h;
  const double down = reference_loss(t);
  x = saved;
  return (up - down) / (2 * h);
}

/// Rows become ifc:first_id, ifc:first_id+1, ...
inline b2v::EmbeddingMatrix from_rows(const std::vector<std::vector<float>>& rows,
                                      std::vector<std::string> labels = {}, std::uint64_t first_id = 1) {
  std::vector<NodeId> vocab;
  for (std::size_t i = 0; i < rows.size(); ++i) vocab.push_back(NodeId::ifc(static_cast<std::int64_t>(first_id + i)));
  b2v::EmbeddingMatrix emb(static_cast<std::uint32_t>(rows[0].size()), vocab, std::move(labels));
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), emb.input(i).begin());
  return emb;
}

inline b2v::EmbeddingMatrix random_matrix(std::mt19937_64& gen, std::size_t rows, std::uint32_t dim) {
  std::normal_distribution<float> nd;
  std::vector<std::vector<float>> r(rows, std::vector<float>(dim));
  for (auto& row : r) {
    for (auto& x : row) x = nd(gen);
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < rows; ++i) labels.push_back(i % 3 == 0 ? "CELL" : "IFCWALL");
  return from_rows(r, labels);
}

inline bool is_one_hot(const b2v::OneHot& v) {
  int ones = 0, zeros = 0;
  for (int x : v) {
    ones += x == 1;
    zeros += x == 0;
  }
  return ones == 1 && zeros == 2;
}

}  // namespace oracles
