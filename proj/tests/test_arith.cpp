#include <gtest/gtest.h>

#include <random>

#include "cubes/arith.hpp"

using namespace cubes;

TEST(Factor, SmallExamples) {
  EXPECT_TRUE(factor(1).factors.empty());
  const auto f = factor(360);
  ASSERT_EQ(f.factors.size(), 3u);
  EXPECT_EQ(f.factors[0], (PrimePower{2, 3}));
  EXPECT_EQ(f.factors[1], (PrimePower{3, 2}));
  EXPECT_EQ(f.factors[2], (PrimePower{5, 1}));
  const auto g = factor(27 * 8);
  ASSERT_EQ(g.factors.size(), 2u);
  EXPECT_EQ(g.factors[0], (PrimePower{2, 3}));
  EXPECT_EQ(g.factors[1], (PrimePower{3, 3}));
}

TEST(Factor, RejectsZeroAndHuge) {
  EXPECT_THROW(factor(0), std::invalid_argument);
  EXPECT_THROW(factor(UINT64_MAX), std::invalid_argument);
}

TEST(Factor, LargeSemiprimeUsesRho) {
  const u64 p = 1000000007ULL, q = 998244353ULL;
  const auto f = factor(p * q);
  ASSERT_EQ(f.factors.size(), 2u);
  EXPECT_EQ(f.factors[0].p, q);
  EXPECT_EQ(f.factors[1].p, p);
}

TEST(Factor, ProductAndOrderInvariant) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const u64 n = rng() % (u64{1} << 62) + 1;
    const auto f = factor(n);
    u64 prod = 1;
    u64 last = 1;
    for (const auto& [p, e] : f.factors) {
      EXPECT_GT(p, last);
      EXPECT_GE(e, 1);
      EXPECT_TRUE(is_prime(p));
      for (int k = 0; k < e; ++k) prod *= p;
      last = p;
    }
    EXPECT_EQ(prod, n);
  }
}

TEST(Multiplicative, CoprimePairs) {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 3000) {
    const u64 m = rng() % 10000 + 1, n = rng() % 10000 + 1;
    if (std::gcd(m, n) != 1) continue;
    EXPECT_EQ(euler_phi(m * n), euler_phi(m) * euler_phi(n));
    EXPECT_EQ(moebius(m * n), moebius(m) * moebius(n));
    EXPECT_EQ(num_divisors(m * n), num_divisors(m) * num_divisors(n));
    ++checked;
  }
}

TEST(Multiplicative, SmallValues) {
  EXPECT_EQ(euler_phi(1), 1u);
  EXPECT_EQ(euler_phi(36), 12u);
  EXPECT_EQ(moebius(30), -1);
  EXPECT_EQ(moebius(12), 0);
  EXPECT_EQ(num_divisors(360), 24u);
  EXPECT_EQ(omega(360), 3);
  EXPECT_EQ(radical(360), 30u);
  EXPECT_EQ(divisors(12), (std::vector<u64>{1, 2, 3, 4, 6, 12}));
}

TEST(Parts, Examples) {
  auto d = sq_cub_parts(12);
  EXPECT_EQ(d.sq, 4u);
  EXPECT_EQ(d.cub, 1u);
  d = sq_cub_parts(8);
  EXPECT_EQ(d.sq, 8u);
  EXPECT_EQ(d.cub, 8u);
  d = sq_cub_parts(1);
  EXPECT_EQ(d.sq, 1u);
  EXPECT_EQ(d.cub, 1u);
}

TEST(Parts, IdempotentAndNested) {
  for (u64 n = 1; n <= 1000000; ++n) {
    const auto d = sq_cub_parts(n);
    ASSERT_EQ(sq_cub_parts(d.sq).sq, d.sq) << n;
    ASSERT_EQ(sq_cub_parts(d.cub).cub, d.cub) << n;
    ASSERT_EQ(d.sq % d.cub, 0u) << n;
    ASSERT_EQ(n % d.sq, 0u) << n;
  }
}

TEST(Parts, SquareFullClassByDivisors) {
  for (i64 a = -10000; a <= 10000; ++a) {
    for (u64 D : {1u, 4u, 8u, 50u}) {
      bool expected = false;
      if (a != 0) {
        // Largest square-full divisor s with gcd(s, n/s) = 1, found by enumeration.
        const u64 n = abs_u64(a);
        u64 sq = 1;
        for (u64 s : divisors(n)) {
          if (std::gcd(s, n / s) != 1) continue;
          bool full = true;
          for (const auto& [p, e] : factor(s).factors) full = full && e >= 2;
          bool rest_free = true;
          for (const auto& [p, e] : factor(n / s).factors) rest_free = rest_free && e == 1;
          if (full && rest_free) sq = s;
        }
        expected = sq <= D;
      }
      ASSERT_EQ(in_square_full_class(a, D), expected) << a << " " << D;
    }
  }
}

TEST(Crt, Examples) {
  EXPECT_EQ(crt_combine({{1, 2}, {2, 3}}), (Residue{5, 6}));
  EXPECT_EQ(crt_combine({{0, 4}, {3, 7}}), (Residue{24, 28}));
  EXPECT_EQ(crt_combine({{5, 1}}), (Residue{0, 1}));
  EXPECT_EQ(crt_combine({{-1, 5}, {2, 9}}), (Residue{29, 45}));
}

TEST(Crt, BruteForceAgreement) {
  for (u64 m1 = 1; m1 <= 12; ++m1) {
    for (u64 m2 = 1; m2 <= 12; ++m2) {
      if (std::gcd(m1, m2) != 1) continue;
      for (u64 r1 = 0; r1 < m1; ++r1) {
        for (u64 r2 = 0; r2 < m2; ++r2) {
          u64 x = 0;
          while (x % m1 != r1 || x % m2 != r2) ++x;
          ASSERT_EQ(crt_combine({{static_cast<i64>(r1), m1}, {static_cast<i64>(r2), m2}}).value, x);
        }
      }
    }
  }
}

TEST(Crt, RejectsNonCoprimeNamingPair) {
  try {
    crt_combine({{1, 3}, {0, 4}, {1, 6}});
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('3'), std::string::npos);
    EXPECT_NE(msg.find('6'), std::string::npos);
  }
}

TEST(Admissible, Mod9Classes) {
  int count = 0;
  for (i64 a = -10; a <= 10; ++a) count += is_admissible(a) ? 1 : 0;
  EXPECT_EQ(count, 17);
  EXPECT_FALSE(is_admissible(4));
  EXPECT_FALSE(is_admissible(-4));
  EXPECT_FALSE(is_admissible(13));
  EXPECT_TRUE(is_admissible(3));
}
