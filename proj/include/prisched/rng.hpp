#pragma once

#include <cstdint>
#include <random>

namespace prisched {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for sub-stream `index` of `purpose` under a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t purpose, std::uint64_t index = 0) {
  return mix64(mix64(master ^ mix64(purpose)) + index);
}

namespace stream_purpose {
inline constexpr std::uint64_t arrivals = 1;
inline constexpr std::uint64_t shared_phase = 2;
inline constexpr std::uint64_t priority = 3;
inline constexpr std::uint64_t replication = 4;
inline constexpr std::uint64_t geometry = 5;
}  // namespace stream_purpose

/// Portable random stream: mt19937_64 plus fixed bit-level conversions, so
/// sample paths do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace prisched
