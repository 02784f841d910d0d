#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace gspr {

/// Derives an independent child seed from a parent seed and a stream label.
/// Streams form a tree (master -> component -> rep), so adding a new labelled
/// stream never shifts the draws of an existing one.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

/// Counter-based generator: the k-th output is a SplitMix64 finaliser applied
/// to (key + k * golden_gamma). Output is a pure function of (key, k), so the
/// sequence is identical on every platform and compiler.
class CounterRng {
public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  /// Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via Box-Muller (cosine branch only).
  double normal();

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gspr
