#pragma once

// Walker/Vose alias tables for O(1) sampling from a discrete distribution.

#include <cstdint>
#include <span>
#include <vector>

#include "b2v/random.hpp"

namespace b2v {

/// Builds prob/alias columns in place from non-negative weights. `prob` and
/// `alias` must have weights.size() entries. Returns false when every weight
/// is zero (columns left untouched).
bool build_alias(std::span<const double> weights, std::span<double> prob,
                 std::span<std::uint32_t> alias);

/// Draws an outcome index: one draw picks a column, a second flips its coin.
inline std::uint32_t sample_alias(std::span<const double> prob, std::span<const std::uint32_t> alias,
                                  RandomStream& rng) {
  const auto k = static_cast<std::uint32_t>(rng.below(prob.size()));
  return rng.uniform() < prob[k] ? k : alias[k];
}

/// Exact outcome probabilities encoded by an alias table.
std::vector<double> alias_distribution(std::span<const double> prob,
                                       std::span<const std::uint32_t> alias);

class AliasTable {
 public:
  AliasTable() = default;
  /// Throws Errc::AllZeroCounts when no weight is positive, InvalidArgument
  /// for negative or non-finite weights.
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  const std::vector<double>& prob() const { return prob_; }
  const std::vector<std::uint32_t>& alias() const { return alias_; }

  std::uint32_t sample(RandomStream& rng) const { return sample_alias(prob_, alias_, rng); }
  std::vector<double> distribution() const { return alias_distribution(prob_, alias_); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace b2v
