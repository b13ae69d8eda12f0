#pragma once

// Seeded random streams.
//
// Every independent unit of work (one walk, one training pass over one walk)
// gets its own std::mt19937_64 seeded from a SplitMix64 hash of the run seed and
// the unit's coordinates, so serial and parallel runs draw identical numbers.
// Floating-point and bounded-integer draws are done by hand rather than through
// <random> distributions, whose outputs are implementation-defined.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace b2v {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6A09E667F3BCC908ULL;
  for (auto w : words) h = splitmix64(h ^ splitmix64(w));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}
  RandomStream(std::initializer_list<std::uint64_t> words) : gen_(hash_words(words)) {}

  std::uint64_t next() { return gen_(); }
  double uniform() { return unit_double(gen_()); }
  /// Uniform integer in [0, n), n > 0 (multiply-shift, negligible bias for
  /// the table sizes used here).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

// Domain tags keep streams for different purposes apart.
enum class StreamTag : std::uint64_t {
  WalkOrder = 1,
  Walk = 2,
  Init = 3,
  Train = 4,
  Window = 5,
  Subsample = 6,
};

}  // namespace b2v
