#pragma once

// Skip-gram with negative sampling over a walk corpus.
//
// For a center c and context o the loss is
//   -log s(u_o . v_c) - sum_k log s(-u_nk . v_c)
// with v the input vectors, u the output vectors and s the logistic function.
// The returned embedding is the input vectors.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "b2v/alias.hpp"
#include "b2v/embedding.hpp"
#include "b2v/walks.hpp"

namespace b2v {

struct TrainConfig {
  std::uint32_t dimension = 128;
  std::uint32_t window = 10;
  std::uint32_t negatives = 5;
  std::uint32_t epochs = 5;
  double initial_lr = 0.025;
  double min_lr = 0.0001;
  std::uint64_t seed = 42;
  /// Single worker, bit-reproducible. Otherwise lock-free concurrent updates.
  bool deterministic = true;
  /// Sample the effective window uniformly in [1, window] per center.
  bool shrink_window = true;
  /// Frequent-node subsampling threshold; 0 disables it.
  double subsample = 0.0;

  void validate() const;
};

template <class T>
T log_sigmoid(T x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

template <class T>
T sigmoid(T x) {
  if (x >= 0) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <class T>
T dot(std::span<const T> a, std::span<const T> b) {
  T s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Loss of one (center, context, negatives) triple.
template <class T>
T sgns_loss(std::span<const T> v, std::span<const T> u_o,
            const std::vector<std::span<const T>>& u_neg) {
  T loss = -log_sigmoid(dot(u_o, v));
  for (const auto& u : u_neg) loss -= log_sigmoid(-dot(u, v));
  return loss;
}

/// Analytic gradients of sgns_loss. Output spans are overwritten.
template <class T>
void sgns_gradient(std::span<const T> v, std::span<const T> u_o,
                   const std::vector<std::span<const T>>& u_neg, std::span<T> grad_v,
                   std::span<T> grad_uo, const std::vector<std::span<T>>& grad_neg) {
  const std::size_t n = v.size();
  const T go = sigmoid(dot(u_o, v)) - T(1);
  for (std::size_t i = 0; i < n; ++i) {
    grad_v[i] = go * u_o[i];
    grad_uo[i] = go * v[i];
  }
  for (std::size_t k = 0; k < u_neg.size(); ++k) {
    const T gk = sigmoid(dot(u_neg[k], v));
    for (std::size_t i = 0; i < n; ++i) {
      grad_v[i] += gk * u_neg[k][i];
      grad_neg[k][i] = gk * v[i];
    }
  }
}

/// One SGD step in place: output rows move first (using the old center), the
/// center moves last by its accumulated gradient. `targets[0]` is the
/// context row, the rest are negatives. Returns the loss before the step.
template <class T>
T sgns_step(T* v, T* const* targets, std::size_t target_count, std::size_t n, T lr, T* scratch) {
  T loss = 0;
  for (std::size_t i = 0; i < n; ++i) scratch[i] = 0;
  for (std::size_t k = 0; k < target_count; ++k) {
    T* u = targets[k];
    T f = 0;
    for (std::size_t i = 0; i < n; ++i) f += u[i] * v[i];
    const T label = k == 0 ? T(1) : T(0);
    loss -= k == 0 ? log_sigmoid(f) : log_sigmoid(-f);
    const T g = lr * (label - sigmoid(f));
    for (std::size_t i = 0; i < n; ++i) scratch[i] += g * u[i];
    for (std::size_t i = 0; i < n; ++i) u[i] += g * v[i];
  }
  for (std::size_t i = 0; i < n; ++i) v[i] += scratch[i];
  return loss;
}

/// Draws dense indices with probability counts[i]^0.75 / sum counts[j]^0.75.
class NegativeSampler {
 public:
  /// Throws AllZeroCounts when every count is zero.
  explicit NegativeSampler(std::span<const std::uint64_t> counts);

  std::uint32_t sample(RandomStream& rng) const { return table_.sample(rng); }
  std::vector<double> distribution() const { return table_.distribution(); }
  std::size_t size() const { return table_.size(); }

 private:
  AliasTable table_;
};

struct TrainReport {
  std::uint64_t total_pairs = 0;       // over all epochs
  std::vector<double> epoch_loss;      // mean loss per pair, per epoch
};

/// Throws EmptyCorpus for a corpus without tokens and InvariantViolation if
/// a vector entry becomes non-finite.
EmbeddingMatrix train(const WalkCorpus& corpus, const TrainConfig& cfg, int workers = 1,
                      TrainReport* report = nullptr);

/// Input vectors as initialized for `seed`, output vectors zero.
EmbeddingMatrix initial_embedding(const std::vector<NodeId>& vocabulary, std::uint32_t dimension,
                                  std::uint64_t seed);

/// Number of (center, context) pairs train() visits, computed without
/// touching any vectors.
std::uint64_t count_pairs(const WalkCorpus& corpus, const TrainConfig& cfg);

}  // namespace b2v
