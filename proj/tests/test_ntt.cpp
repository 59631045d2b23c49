#include <gtest/gtest.h>

#include <random>

#include "cubes/ntt.hpp"

using namespace cubes;

TEST(Ntt, PrimesSupportLength) {
  for (const auto& prime : {ntt::kPrimeA, ntt::kPrimeB}) {
    EXPECT_TRUE(is_prime(prime.modulus));
    EXPECT_EQ((prime.modulus - 1) % (u64{1} << ntt::kMaxLog2), 0u);
    // generator order is exactly p - 1 on the 2-part
    EXPECT_NE(powmod(prime.generator, (prime.modulus - 1) / 2, prime.modulus), 1u);
  }
}

TEST(Ntt, RoundTrip) {
  std::mt19937_64 rng(3);
  std::vector<u64> a(1024);
  for (auto& x : a) x = rng() % ntt::kPrimeA.modulus;
  auto b = a;
  ntt::transform(b, ntt::kPrimeA, false);
  ntt::transform(b, ntt::kPrimeA, true);
  EXPECT_EQ(a, b);
}

TEST(Ntt, MatchesDirectOnRandomInputs) {
  std::mt19937_64 rng(5);
  for (std::size_t m : {1u, 2u, 7u, 64u, 100u, 729u, 1000u}) {
    std::vector<u64> x(m), y(m);
    for (auto& v : x) v = rng() % 1000000;
    for (auto& v : y) v = rng() % 1000000;
    EXPECT_EQ(ntt::cyclic_ntt(x, y), ntt::cyclic_direct(x, y)) << m;
  }
}

TEST(Ntt, LargeEntriesNeedBothPrimes) {
  // Products near 2^60 exceed either prime alone.
  const std::size_t m = 15;
  std::vector<u64> x(m, (u64{1} << 29) + 17), y(m, (u64{1} << 30) + 5);
  EXPECT_EQ(ntt::cyclic_ntt(x, y), ntt::cyclic_direct(x, y));
}

TEST(Ntt, DetectsOverflow) {
  std::vector<u64> x(4, u64{1} << 40), y(4, u64{1} << 40);
  EXPECT_THROW(ntt::cyclic_direct(x, y), std::overflow_error);
  EXPECT_THROW(ntt::cyclic_ntt(x, y), std::overflow_error);
}

TEST(Ntt, LengthMismatch) {
  std::vector<u64> x(3), y(4);
  EXPECT_THROW(ntt::cyclic_direct(x, y), std::invalid_argument);
}
