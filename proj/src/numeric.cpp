#include "gspr/numeric.hpp"

#include <cmath>

#include "gspr/errors.hpp"

namespace gspr {

double int_pow(double x, int k) {
  double result = 1.0;
  double base = x;
  for (int e = k; e > 0; e >>= 1) {
    if (e & 1) result *= base;
    base *= base;
  }
  return result;
}

namespace {

constexpr double kExactIntegerLimit = 9007199254740992.0;  // 2^53

double from_log(double log_value) {
  const double value = std::exp(log_value);
  return value < kExactIntegerLimit ? std::round(value) : value;
}

}  // namespace

double binomial(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0.0;
  return from_log(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

double multinomial3(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0) return 0.0;
  return from_log(std::lgamma(a + b + c + 1.0) - std::lgamma(a + 1.0) - std::lgamma(b + 1.0) -
                  std::lgamma(c + 1.0));
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 32;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::uint64_t fnv1a64(std::span<const char> bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace gspr
