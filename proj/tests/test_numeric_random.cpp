#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "gspr/numeric.hpp"
#include "gspr/random.hpp"

using namespace gspr;

TEST(Numeric, IntPowZeroToZeroIsOne) {
  EXPECT_EQ(int_pow(0.0, 0), 1.0);
  EXPECT_EQ(int_pow(0.0, 3), 0.0);
  EXPECT_DOUBLE_EQ(int_pow(0.5, 3), 0.125);
}

TEST(Numeric, BinomialMatchesPascal) {
  // Pascal's triangle built by addition is exact in doubles at this size.
  std::vector<std::vector<double>> pascal(40);
  for (int n = 0; n < 40; ++n) {
    pascal[n].assign(n + 1, 1.0);
    for (int k = 1; k < n; ++k) pascal[n][k] = pascal[n - 1][k - 1] + pascal[n - 1][k];
    for (int k = 0; k <= n; ++k) EXPECT_EQ(binomial(n, k), pascal[n][k]) << n << " " << k;
  }
  EXPECT_EQ(binomial(3, 5), 0.0);
}

TEST(Numeric, MultinomialMatchesFactorials) {
  auto fact = [](int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
  };
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b)
      for (int c = 0; c <= 6; ++c)
        EXPECT_EQ(multinomial3(a, b, c), fact(a + b + c) / (fact(a) * fact(b) * fact(c)));
}

TEST(Numeric, PairwiseSumOfIntegersIsExact) {
  std::vector<double> v(10001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(v), 10000.0 * 10001.0 / 2.0);
  EXPECT_EQ(pairwise_sum(std::span<const double>{}), 0.0);
}

TEST(Numeric, Fnv1aKnownVectors) {
  // Published FNV-1a 64 test vectors.
  EXPECT_EQ(fnv1a64(std::span<const char>{}), 0xcbf29ce484222325ULL);
  const std::string a = "a";
  EXPECT_EQ(fnv1a64(a), 0xaf63dc4c8601ec8cULL);
  const std::string foobar = "foobar";
  EXPECT_EQ(fnv1a64(foobar), 0x85944171f73967e8ULL);
}

TEST(Random, SameKeySameSequence) {
  CounterRng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_EQ(a.counter(), 100u);
}

TEST(Random, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (const char* label : {"train", "test", "reference", "convergence", "equilibrium_grid"})
    seen.insert(derive_seed(7, label));
  for (std::uint64_t k = 0; k < 100; ++k) seen.insert(derive_seed(7, k));
  EXPECT_EQ(seen.size(), 105u);
  EXPECT_NE(derive_seed(7, "train"), derive_seed(8, "train"));
}

TEST(Random, UniformMomentsAndRange) {
  CounterRng rng(1);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  // Mean and variance within 5 standard errors.
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sum2 / n - (sum / n) * (sum / n), 1.0 / 12.0, 5e-3);
}

TEST(Random, NormalMoments) {
  CounterRng rng(3);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(sum2 / n, 1.0, 0.02);
}

TEST(Random, BelowIsUnbiased) {
  CounterRng rng(5);
  std::vector<int> counts(6, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[rng.below(6)];
  for (int c : counts) EXPECT_NEAR(c, n / 6.0, 5.0 * std::sqrt(n * (1.0 / 6) * (5.0 / 6)));
}
