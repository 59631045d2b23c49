#include <gtest/gtest.h>

#include <random>

#include "cubes/singular_series.hpp"

using namespace cubes;

TEST(SeriesWindow, Examples) {
  TTable table;
  const auto w1 = series_window(1, -50, 50, NumericMode::exact, table);
  for (const auto& v : w1.s_exact) EXPECT_EQ(v, 1);
  EXPECT_EQ(w1.s.size(), 101u);
  const auto w = series_window(4, 0, 1, NumericMode::exact, table);
  EXPECT_EQ(w.s_exact[0], Rational(5, 4));
  EXPECT_EQ(w.s_exact[1], 1);
  EXPECT_EQ(s_exact(0, 4, table), Rational(5, 4));
  EXPECT_THROW(series_window(0, 0, 1, NumericMode::real, table), std::invalid_argument);
  EXPECT_THROW(series_window(4, 0, 20000, NumericMode::exact, table), std::invalid_argument);
}

TEST(SeriesWindow, RealMatchesExact) {
  TTable table;
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    const u64 K = rng() % 64 + 1;
    const i64 a = static_cast<i64>(rng() % 20001) - 10000;
    const auto w = series_window(K, a, a, NumericMode::real, table);
    const double exact_s = to_double(s_exact(a, K, table));
    const double exact_m = to_double(mollifier_exact(a, K, table));
    EXPECT_LE(std::fabs(w.s[0] - exact_s), 1e-10 * std::max(1.0, std::fabs(exact_s))) << a << " " << K;
    EXPECT_LE(std::fabs(w.m[0] - exact_m), 1e-10 * std::max(1.0, std::fabs(exact_m))) << a << " " << K;
  }
}

TEST(SeriesWindow, ThreadCountDoesNotChangeOutput) {
  TTable table;
  const auto one = series_window(32, -20000, 20000, NumericMode::real, table, 1);
  const auto four = series_window(32, -20000, 20000, NumericMode::real, table, 4);
  EXPECT_EQ(one.s, four.s);
  EXPECT_EQ(one.m, four.m);
}

TEST(CCoeff, Examples) {
  TTable table;
  EXPECT_EQ(c_coeff(1, factor(1), table), 1);
  EXPECT_EQ(c_coeff(1, factor(5), table), 0);
  EXPECT_EQ(c_coeff(1, factor(7), table), 0);
  for (u64 p : primes_up_to(200)) {
    if (p >= 7) {
      EXPECT_EQ(c_coeff(2, factor(p), table), 0) << p;
    }
  }
  EXPECT_THROW(c_coeff(0, factor(7), table), std::invalid_argument);
}

TEST(GammaFactor, Examples) {
  TTable table;
  EXPECT_EQ(gamma_factor(1, 5, table).value, 1);
  EXPECT_EQ(gamma_factor(1, 2, table).value, 1);
  const auto g7 = gamma_factor(1, 7, table);
  EXPECT_EQ(g7.mollifier, Rational(56, 343));
  EXPECT_EQ(g7.value, Rational(90, 49) * Rational(56, 343));
  EXPECT_GT(g7.value, 0);
  for (i64 a : {4, -4, 13, 14, 22}) EXPECT_EQ(gamma_factor(a, 3, table).value, 0) << a;
}

TEST(GammaFactor, PositiveOnAdmissibleClasses) {
  TTable table;
  for (i64 a = -200; a <= 200; ++a) {
    if (a == 0) continue;
    for (u64 p : primes_up_to(50)) {
      const auto g = gamma_factor(a, p, table);
      ASSERT_GT(g.mollifier, Rational(1, 100));
      ASSERT_LT(g.mollifier, Rational(199, 100));
      if (is_admissible(a)) {
        ASSERT_GT(g.value, 0) << a << " " << p;
      }
    }
  }
}

TEST(Gamma, Composition) {
  TTable table;
  EXPECT_DOUBLE_EQ(gamma(1, 2, table).value, 1.0);
  const double expected = to_double(gamma_factor(1, 2, table).value * gamma_factor(1, 3, table).value *
                                    gamma_factor(1, 5, table).value);
  EXPECT_DOUBLE_EQ(gamma(1, 5, table).value, expected);
  EXPECT_EQ(gamma_factor(1, 3, table).value, sigma_p_a(3, 1, table).value);
  const auto g = gamma(2, 1000, table);
  EXPECT_GT(g.value, 0);
  EXPECT_LT(g.stabilization, 0.05 * g.value);
}

TEST(EulerTruncation, SmallKExamples) {
  TTable table;
  const auto r = euler_truncation_check(1, {1, 5}, 100, table);
  EXPECT_DOUBLE_EQ(r.partial[0], 1.0);
  EXPECT_DOUBLE_EQ(r.partial[1], 1.0);
}

TEST(EulerTruncation, DifferenceShrinksForA2) {
  TTable table;
  const auto r = euler_truncation_check(2, {8, 16, 32, 64}, 1000, table);
  EXPECT_LT(std::fabs(r.difference.back()), std::fabs(r.difference.front()));
}

TEST(IdentitySTimesM, Examples) {
  TTable table;
  const auto one = identity_check_s_times_m(1, 1, table);
  EXPECT_TRUE(one.ok);
  EXPECT_EQ(one.lhs, 1);
  EXPECT_TRUE(identity_check_s_times_m(2, 8, table).ok);
  EXPECT_THROW(identity_check_s_times_m(0, 8, table), std::invalid_argument);
}

TEST(IdentitySTimesM, Grid) {
  TTable table;
  for (i64 a = -50; a <= 50; ++a) {
    if (a == 0) continue;
    for (u64 K : {4u, 8u, 16u, 32u}) {
      const auto chk = identity_check_s_times_m(a, K, table);
      ASSERT_TRUE(chk.ok) << a << " " << K << (chk.mismatches.empty() ? "" : chk.mismatches.front());
    }
  }
}

TEST(ExceptionalScan, Examples) {
  TTable table;
  EXPECT_EQ(exceptional_scan(10, 1, 0.5, table).count, 0u);
  const auto s = exceptional_scan(10, 1, 2, table);
  EXPECT_EQ(s.count, 17u);
  u64 total = 0;
  for (u64 h : s.histogram) total += h;
  EXPECT_EQ(total, 21u);
  const auto big = exceptional_scan(10000, 32, 0.1, table);
  EXPECT_EQ(big.trend_K, (std::vector<u64>{8, 16, 32}));
  EXPECT_EQ(big.trend_fraction.back(), big.count / 20000.0);
}

TEST(SupportLemma, CubeFullPartBounded) {
  TTable table;
  for (u64 D = 1; D <= 8; ++D) {
    for (i64 a = -300; a <= 300; ++a) {
      if (a == 0 || sq_cub_parts(abs_u64(a)).sq > D) continue;
      for (u64 n = 1; n <= 2000; ++n) {
        const auto parts = sq_cub_parts(n);
        if (parts.cub * parts.cub <= 729 * D * D * D) continue;  // cub <= 27 D^{3/2}
        ASSERT_EQ(table.value(a, n), 0) << a << " " << n;
      }
    }
  }
}

TEST(NearlyCubeFreeBound, CalibratedConstantReport) {
  // |T^nat_a(n)| <= 9^{omega(n)} (cub(n) n)^{1/2}; violations are counted, not fatal.
  TTable table;
  u64 violations = 0;
  for (u64 n = 1; n <= 2000; ++n) {
    const auto f = factor(n);
    const auto parts = sq_cub_parts(f);
    const double bound = std::pow(9.0, omega(f)) * std::sqrt(double(parts.cub) * double(n));
    const auto& t = table.full(n);
    for (i64 v : t.values)
      if (std::fabs(double(v)) / (double(n) * n) > bound) ++violations;
  }
  RecordProperty("violations", static_cast<int>(violations));
  EXPECT_EQ(violations, 0u);
}

TEST(MomentReport, ExamplesAndVanishing) {
  TTable table;
  const auto rep = moment_report({2, 3, 5, 7}, 3, 1, 100000, table);
  EXPECT_EQ(rep.vanishing_violations, 0u);
  bool saw4 = false, saw7 = false;
  for (const auto& e : rep.entries) {
    if (e.p == 2 && e.m_exp[0] == 2 && e.n_exp[0] == 2) {
      EXPECT_EQ(e.abs_mean, Rational(1, 2));
      saw4 = true;
    }
    if (e.p == 7 && e.m_exp[0] == 1 && e.n_exp[0] == 0) {
      EXPECT_EQ(e.signed_sum, 0);
    }
    if (e.p == 7 && e.m_exp[0] == 1 && e.n_exp[0] == 1) {
      Rational expected = 0;
      for (i64 v : table.prime_power(7, 1).values) expected += Rational(BigInt(v) * v, BigInt(7 * 7 * 7 * 7));
      EXPECT_EQ(e.abs_mean, expected / 7);
      saw7 = true;
    }
  }
  EXPECT_TRUE(saw4);
  EXPECT_TRUE(saw7);
  EXPECT_GT(rep.max_ratio, 0);
  const auto rep2 = moment_report({2, 7}, 2, 2, 100000, table);
  EXPECT_EQ(rep2.vanishing_violations, 0u);
}
