#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace vcs {

/// SplitMix64 finalizer; used to turn (seed, id) pairs into independent keys.
std::uint64_t splitmix64(std::uint64_t x);

/// Stable per-cell seed: identical for identical (master, id) across runs.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t id);

/// One Philox-4x32-10 block (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Counter-based random stream: the output depends only on (key, stream) and
/// the draw position, never on which thread or in which order streams are
/// consumed. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t key, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal() { return normal_(*this); }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  unsigned pos_ = 2;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace vcs
