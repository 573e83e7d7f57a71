#pragma once

#include <cstdint>
#include <limits>

namespace qnn_forge {

/// Stream ids. Every consumer of randomness draws from its own stream so that
/// e.g. dataset generation never perturbs shot sampling.
enum class Stream : std::uint64_t {
  kDataset = 1,
  kShots = 2,
  kInit = 3,
  kTestCases = 4,
};

/// Counter-based generator: the k-th output of stream s under seed x is a pure
/// function mix(x, s, k). Splitting is free, and two generators with the same
/// (seed, stream) produce identical sequences on every platform.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}
  CounterRng(std::uint64_t seed, Stream stream) noexcept
      : CounterRng(seed, static_cast<std::uint64_t>(stream)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound). Rejection sampling, so unbiased.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % bound;
  }

  /// Derive an independent child stream.
  CounterRng split(std::uint64_t child) const noexcept { return CounterRng(key_, child); }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  // SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qnn_forge
