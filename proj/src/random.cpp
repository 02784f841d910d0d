#include "gspr/random.hpp"

#include <cmath>
#include <numbers>

namespace gspr {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char ch : label) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return mix64(mix64(parent) ^ h);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return mix64(mix64(parent + kGoldenGamma) ^ mix64(index ^ 0xD1B54A32D192ED03ULL));
}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGoldenGamma);
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_open() {
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
  // Lemire's nearly-divisionless rejection.
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double CounterRng::normal() {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace gspr
