#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ssanova {

/// splitmix64 finalizer; bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Purpose tags keeping the substreams of one seed disjoint.
enum class StreamPurpose : std::uint64_t {
  EvalPoints = 1,    // sampling points for the max statistic
  Weights = 2,       // bootstrap multiplier weights
  DgpCovariates = 3, // simulated design
  DgpNoise = 4,      // simulated noise
  ReplicateSeed = 5, // per-replicate derived seeds in experiments
};

/// Deterministic substream key from (seed, purpose, index).  Identical
/// inputs give identical streams on every platform; distinct replicate
/// indices give unrelated streams, so replicates can run in any order.
constexpr std::uint64_t substream_key(std::uint64_t seed, StreamPurpose purpose,
                                      std::uint64_t index) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ mix64(static_cast<std::uint64_t>(purpose)));
  h = mix64(h ^ mix64(index));
  return h;
}

/// Deterministic random stream.  The engine output is fully specified by
/// the standard; the variate transforms below are explicit, so a given
/// key reproduces the same doubles everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : eng_(key) {}

  static Rng substream(std::uint64_t seed, StreamPurpose purpose,
                       std::uint64_t index) {
    return Rng(substream_key(seed, purpose, index));
  }

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform on [0,1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  /// Standard exponential via inverse CDF; finite for all draws.
  double exponential() { return -std::log1p(-uniform()); }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u = uniform();
    const double v = uniform();
    const double radius = std::sqrt(-2.0 * std::log1p(-u));
    return radius * std::cos(6.283185307179586476925286766559 * v);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ssanova
