#include "b2v/alias.hpp"

#include <cmath>

#include "b2v/error.hpp"

namespace b2v {

bool build_alias(std::span<const double> weights, std::span<double> prob,
                 std::span<std::uint32_t> alias) {
  const std::size_t k = weights.size();
  double total = 0;
  for (double w : weights) total += w;
  if (!(total > 0)) return false;

  std::vector<double> scaled(k);
  std::vector<std::uint32_t> small;
  std::vector<std::uint32_t> large;
  small.reserve(k);
  large.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    scaled[i] = weights[i] * static_cast<double>(k) / total;
    alias[i] = static_cast<std::uint32_t>(i);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob[s] = scaled[s];
    alias[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (auto i : large) prob[i] = 1.0;
  for (auto i : small) prob[i] = 1.0;
  return true;
}

std::vector<double> alias_distribution(std::span<const double> prob,
                                       std::span<const std::uint32_t> alias) {
  const std::size_t k = prob.size();
  std::vector<double> out(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] += prob[i];
    if (alias[i] != i) out[alias[i]] += 1.0 - prob[i];
  }
  for (auto& v : out) v /= static_cast<double>(k);
  return out;
}

AliasTable::AliasTable(std::span<const double> weights) {
  for (double w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) {
      throw Error(Errc::InvalidArgument, "alias weights must be finite and non-negative");
    }
  }
  prob_.assign(weights.size(), 0.0);
  alias_.assign(weights.size(), 0);
  if (weights.empty() || !build_alias(weights, prob_, alias_)) {
    throw Error(Errc::AllZeroCounts, "distribution has no positive weight");
  }
}

}  // namespace b2v
