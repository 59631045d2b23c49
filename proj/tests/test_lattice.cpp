#include <gtest/gtest.h>

#include <random>
#include <set>

#include "cubes/lattice.hpp"

using namespace cubes;

TEST(CountWeighted, SmallScaleSupport) {
  const auto w = make_nu_star(2, false);
  const auto t = count_weighted(1, w, 1, true);
  EXPECT_EQ(t.a_lim, 3);
  EXPECT_GT(t.points, 0u);
  for (const auto& p : t.kept) {
    EXPECT_LE(std::llabs(p.f), 3);
    for (i64 v : p.y) EXPECT_GE(std::llabs(v), 1);
  }
}

TEST(CountWeighted, MassAndEntriesConsistent) {
  const auto w = make_nu_star(2, false);
  const auto t = count_weighted(12, w, 1, true);
  BigInt entries = 0, points = 0;
  for (i64 v : t.q) entries += v;
  for (const auto& p : t.kept) points += p.q;
  EXPECT_EQ(entries, t.total_mass);
  EXPECT_EQ(points, t.total_mass);
  EXPECT_EQ(t.kept.size(), t.points);
}

TEST(CountWeighted, ThreadsDoNotChangeCounts) {
  const auto w = make_nu_star(2, false);
  const auto one = count_weighted(15, w, 1), three = count_weighted(15, w, 3);
  EXPECT_EQ(one.q, three.q);
  EXPECT_EQ(one.total_mass, three.total_mass);
}

TEST(CountWeighted, IndependentLoopOrder) {
  const auto w = make_nu_star(2, false);
  const auto t = count_weighted(30, w);
  EXPECT_EQ(t.raw(0), 0);  // x^3 + y^3 = -z^3 forces a vanishing form
  u64 n = 0;
  EXPECT_EQ(count_at(0, 30, w, &n), 0);
  std::mt19937_64 rng(8);
  int nonzero = 0;
  for (int i = 0; i < 40; ++i) {
    const i64 a = static_cast<i64>(rng() % static_cast<u64>(2 * t.a_lim + 1)) - t.a_lim;
    const i64 direct = count_at(a, 30, w);
    ASSERT_EQ(direct, t.raw(a)) << a;
    nonzero += direct != 0;
  }
  EXPECT_GT(nonzero, 0);
}

TEST(CountWeighted, HasseClassesAndWitnesses) {
  const auto w = make_nu_star(2, false);
  const auto t = count_weighted(20, w, 1, true);
  for (i64 a = -t.a_lim; a <= t.a_lim; ++a) {
    if (t.raw(a) == 0) continue;
    const i64 r = ((a % 9) + 9) % 9;
    ASSERT_TRUE(r != 4 && r != 5) << a;
  }
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto& p = t.kept[rng() % t.kept.size()];
    ASSERT_EQ(cube_form(p.y), p.f);
    ASSERT_NE(t.raw(p.f), 0);
  }
}

TEST(CountWeighted, EnumerationBound) {
  const auto w = make_nu_star(8, false);
  try {
    count_weighted(2000, w);
    FAIL() << "expected a size error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("176000"), std::string::npos);
  }
}

TEST(PairCount, DefinitionAndRange) {
  const auto w = make_nu_star(2, false);
  const auto t = count_weighted(10, w, 1, true);
  BigInt sq = 0;
  for (i64 v : t.q) sq += BigInt(v) * v;
  EXPECT_EQ(pair_count(t, 1), sq);
  const u64 huge = 3 * 1000 * 22 * 22 * 22 + 1;
  EXPECT_EQ(pair_count(t, huge), BigInt(t.raw(0)) * t.raw(0));
}

TEST(PairCount, FiberProductMatchesPairEnumeration) {
  const auto w = make_nu_star(2, false);
  for (u64 X : {5u, 12u, 20u}) {
    const auto t = count_weighted(X, w, 1, true);
    for (u64 d : {1u, 2u, 3u}) ASSERT_EQ(pair_count(t, d), pair_count_bruteforce(t, d)) << X << " " << d;
  }
}

TEST(SpecialCount, PerPointContributions) {
  const auto w = make_nu_star(2, false);
  CountTable t;
  t.X = 1;
  t.points = 7;
  const i64 q1 = 1000, q2 = 7;
  // Distinct coordinates: the full orbit is present.
  std::vector<IVec3> orbit{{1, 2, 3}, {1, 3, 2}, {2, 1, 3}, {2, 3, 1}, {3, 1, 2}, {3, 2, 1}};
  for (const auto& y : orbit) t.kept.push_back({y, 36, q1});
  t.kept.push_back({{2, 2, 2}, 24, q2});
  const auto s = special_count(t, 1, w);
  EXPECT_EQ(s.diag, BigInt(6) * 6 * q1 * q1 + BigInt(6) * q2 * q2);
  EXPECT_EQ(s.formula, s.diag);
  EXPECT_EQ(s.distinct, BigInt(6) * 6 * q1 * q1 + BigInt(q2) * q2);
  EXPECT_EQ(s.correction, BigInt(5) * q2 * q2);
  EXPECT_EQ(s.repeated, 1u);
  auto bad = w;
  bad.symmetric = false;
  EXPECT_THROW(special_count(t, 1, bad), std::invalid_argument);
}

TEST(SpecialCount, NuStarX20) {
  const auto w = make_nu_star(2, false);
  const auto t = count_weighted(20, w, 1, true);
  const auto s = special_count(t, 1, w);
  EXPECT_EQ(s.diag, s.formula);
  BigInt correction = 0;
  u64 repeated = 0;
  for (const auto& p : t.kept) {
    std::set<IVec3> orbit;
    IVec3 y = p.y;
    std::sort(y.begin(), y.end());
    do orbit.insert(y);
    while (std::next_permutation(y.begin(), y.end()));
    correction += BigInt(6 - static_cast<int>(orbit.size())) * p.q * p.q;
    repeated += orbit.size() < 6;
  }
  EXPECT_EQ(s.correction, correction);
  EXPECT_EQ(s.repeated, repeated);
  EXPECT_GT(repeated, 0u);
}

TEST(R3, Examples) {
  EXPECT_EQ(r3_nonneg(0), 1u);
  EXPECT_EQ(r3_nonneg(2), 3u);
  EXPECT_EQ(r3_nonneg(1729), 12u);
  EXPECT_EQ(r3_nonneg(4), 0u);
}

TEST(R3, OrderedCountFromUnorderedEnumeration) {
  const u64 A = 5000;
  const auto table = r3_table(A);
  std::vector<u64> expected(A + 1, 0);
  for (u64 x = 0; x * x * x <= A; ++x)
    for (u64 y = x; x * x * x + y * y * y <= A; ++y)
      for (u64 z = y; x * x * x + y * y * y + z * z * z <= A; ++z) {
        const u64 a = x * x * x + y * y * y + z * z * z;
        if (x == y && y == z) {
          expected[a] += 1;
        } else if (x == y || y == z) {
          expected[a] += 3;
        } else {
          expected[a] += 6;
        }
      }
  for (u64 a = 0; a <= A; ++a) {
    ASSERT_EQ(table[a], expected[a]) << a;
    if (a % 97 == 0) {
      ASSERT_EQ(r3_nonneg(a), expected[a]) << a;
    }
  }
}

TEST(PrimeDemo, SmallBoundsAndMonotone) {
  const auto d10 = prime_demo(10);
  u64 brute = 0;
  for (u64 p : {2u, 3u, 5u, 7u}) brute += r3_nonneg(p);
  EXPECT_EQ(d10.sum_r3, brute);
  EXPECT_EQ(d10.primes, 4u);
  const auto d100 = prime_demo(100);
  u64 brute100 = 0;
  for (u64 p : primes_up_to(100)) brute100 += r3_nonneg(p);
  EXPECT_EQ(d100.sum_r3, brute100);
  u64 last = 0;
  for (u64 A = 10; A <= 2000; A += 10) {
    const auto d = prime_demo(A);
    ASSERT_GE(d.sum_r3, last);
    last = d.sum_r3;
  }
  EXPECT_THROW(prime_demo(2000000), std::invalid_argument);
}
