#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace dendrram {

// Portable pseudo-random source. The engine is xoshiro256** seeded through
// splitmix64 from (seed, stream); the uniform and normal transforms are
// implemented here rather than taken from <random> so that a given
// (seed, stream) produces the same sequence with any standard library.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream);

  // Stream id derived from a name, e.g. SeededRng::Named(seed, "device").
  static SeededRng Named(std::uint64_t seed, std::string_view name,
                         std::uint64_t index = 0);
  static std::uint64_t StreamId(std::string_view name, std::uint64_t index = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t NextU64();
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer on [0, n). n must be > 0.
  std::uint64_t UniformIndex(std::uint64_t n);
  // Standard normal via Box-Muller; the second variate is cached.
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dendrram
