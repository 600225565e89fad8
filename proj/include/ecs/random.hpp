#pragma once

#include <cstdint>
#include <random>

namespace ecs {

/// Seedable, splittable random stream.  Children are derived from the parent
/// seed and an index only, so a tree of streams is reproducible from one root
/// seed regardless of the order in which children are drawn.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {
    auto seq = seedSeq(seed, 0, 0);
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }

  RandomStream child(std::uint64_t index) const {
    auto seq = seedSeq(seed_, index, 1);
    std::mt19937_64 derive(seq);
    return RandomStream(derive());
  }

  /// Uniform in [0, 1) built from 53 random bits (independent of the
  /// standard library's distribution implementation).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next() { return engine_(); }

 private:
  static std::seed_seq seedSeq(std::uint64_t a, std::uint64_t b, std::uint64_t salt) {
    return std::seed_seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                         static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                         static_cast<std::uint32_t>(salt)};
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace ecs
