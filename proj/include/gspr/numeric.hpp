#pragma once

#include <cstdint>
#include <span>

namespace gspr {

/// x^k for a non-negative integer exponent, with 0^0 = 1.
double int_pow(double x, int k);

/// Binomial coefficient C(n, k) computed through log-gamma; rounded to the
/// nearest integer while that is exactly representable.
double binomial(int n, int k);

/// Multinomial coefficient (a+b+c)! / (a! b! c!) through log-gamma.
double multinomial3(int a, int b, int c);

/// Pairwise summation. The result depends only on the order of `values`.
double pairwise_sum(std::span<const double> values);

/// FNV-1a 64-bit hash, used for provenance records.
std::uint64_t fnv1a64(std::span<const char> bytes);

}  // namespace gspr
