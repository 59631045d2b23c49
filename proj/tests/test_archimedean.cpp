#include <gtest/gtest.h>

#include <random>

#include "cubes/archimedean.hpp"

using namespace cubes;

TEST(Quadrature, PolynomialAndExp) {
  EXPECT_NEAR(quad::integrate([](double x) { return x * x * x - x; }, -1, 2), 2.25, 1e-13);
  EXPECT_NEAR(quad::integrate([](double x) { return std::exp(x); }, 0, 1), std::exp(1.0) - 1, 1e-13);
  EXPECT_EQ(quad::integrate([](double) { return 1.0; }, 1, 1), 0.0);
  EXPECT_NEAR(quad::integrate([](double x) { return w2(x); }, 0, 12), 9.75, 1e-8);
}

TEST(Bump, Examples) {
  EXPECT_EQ(w0(0), 1.0);
  EXPECT_EQ(w2(10), 1.0);
  EXPECT_EQ(w2(0.4), 0.0);
  EXPECT_DOUBLE_EQ(w0(2.5), 0.5);
  EXPECT_DOUBLE_EQ(bump(BumpKind::w2, 0.75), 0.5);
  EXPECT_DOUBLE_EQ(bump(BumpKind::w0, -2.5), 0.5);
}

TEST(Bump, SupportAndPlateau) {
  for (int i = -4000; i <= 4000; ++i) {
    const double t = i * 0.004;
    ASSERT_GE(w0(t), 0.0);
    ASSERT_GE(w2(t), 0.0);
    if (std::fabs(t) <= 2) {
      ASSERT_EQ(w0(t), 1.0) << t;
    }
    if (std::fabs(t) >= 3) {
      ASSERT_EQ(w0(t), 0.0) << t;
    }
    if (t >= 1 && t <= 10) {
      ASSERT_EQ(w2(t), 1.0) << t;
    }
    if (t <= 0.5 || t >= 11) {
      ASSERT_EQ(w2(t), 0.0) << t;
    }
  }
}

TEST(NuStar, Examples) {
  EXPECT_EQ(nu_star({0, 3, -3}, 4), 0.0);
  EXPECT_EQ(nu_star({1, 1, 0}, 4), 0.0);
  const double c = std::cbrt(5.0 - 3 * 27 + 1);
  EXPECT_EQ(nu_star({3, -1, c}, 8), 0.0);  // F0 = 5
  EXPECT_THROW(nu_star({1, 1, 1}, 1.5), std::invalid_argument);
  // y = r0 (4, 4, -cbrt 128): F0 = 0, forms 4, 4, 5.04, 8, 1.04, 1.04 (times r0); all in
  // r [1,10] for r in [0.8 r0, 1.04 r0].
  const double k = std::cbrt(128.0);
  for (double r0 : {1.5, 2.5, 6.0}) {
    const double R = 8;
    const Vec3 y{4 * r0, 4 * r0, -k * r0};
    const double lo = std::max(1.0, 0.8 * r0), hi = std::min(R, (k - 4) * r0);
    ASSERT_LT(lo, hi);
    EXPECT_GE(nu_star(y, R), std::log(hi / lo)) << r0;
  }
}

TEST(NuStar, BreakpointRouteMatchesPlainQuadrature) {
  std::mt19937_64 rng(17);
  const auto w = make_nu_star(4, false);
  quad::Options tight;
  tight.rel_tol = 1e-12;
  tight.initial_cells = 64;
  int checked = 0;
  while (checked < 200) {
    const auto s = sample_shell(w, rng);
    if (!nu_star_support(s.y, 4)) continue;
    const auto L = linear_forms(s.y);
    const auto f = [&](double t) {
      const double r = std::exp(t);
      double v = 1;
      for (double l : L) v *= w2(l / r);
      return v;
    };
    const double plain = w0(cube_form(s.y)) * quad::integrate(f, 0, std::log(4.0), tight);
    ASSERT_NEAR(nu_star(s.y, 4), plain, 1e-8 * std::max(1.0, plain));
    ++checked;
  }
}

TEST(NuStar, VeryCleanAndSymmetricBySampling) {
  std::mt19937_64 rng(2024);
  const double R = 4;
  const auto w = make_nu_star(R, false);
  std::uint64_t support = 0;
  std::uint64_t perm_checked = 0;
  while (support < 100000) {
    const auto s = sample_shell(w, rng);
    if (!w.in_support(s.y)) continue;
    ++support;
    for (double L : linear_forms(s.y)) ASSERT_GE(L, 0.5);
    for (double L : linear_forms(s.y)) ASSERT_LE(L, 11 * R);
    if (support % 5 != 0) continue;
    const double v = w(s.y);
    auto y = s.y;
    std::sort(y.begin(), y.end());
    do {
      ASSERT_EQ(w(y), v);
    } while (std::next_permutation(y.begin(), y.end()));
    ASSERT_EQ(w({-s.y[0], -s.y[1], -s.y[2]}), v);
    ++perm_checked;
  }
  EXPECT_EQ(perm_checked, 20000u);
}

TEST(ShellProfile, EvenAndInterpolated) {
  const auto opt = ShellProfile::default_options();
  for (double t : {0.7, 2.2}) EXPECT_NEAR(ShellProfile::direct(t, opt), ShellProfile::direct(-t, opt), 1e-8);
  const auto phi = ShellProfile::shared();
  for (double t : {0.33, -1.41, 2.87}) {
    const double d = ShellProfile::direct(t, opt);
    EXPECT_NEAR((*phi)(t), d, 1e-5 * d) << t;
  }
}

TEST(SigmaInf, SurfaceQuadratureMatchesProfileRoute) {
  const auto w = make_nu_star(2);
  for (double a : {0.0, 1.3, -2.2}) {
    const double direct = sigma_inf(a, 1, w);
    EXPECT_NEAR(direct, w.density(a), 1e-5 * direct) << a;
  }
}

TEST(SigmaInf, ZeroOutsideSupportAndRejectsUnclean) {
  const auto w = make_nu_star(2);
  EXPECT_EQ(sigma_inf(3 * 8 + 1, 2, w), 0.0);
  EXPECT_EQ(sigma_inf(-3.5, 1, w), 0.0);
  auto bad = make_shell_bump();
  bad.very_clean = false;
  EXPECT_THROW(sigma_inf(0, 1, bad), std::invalid_argument);
}

TEST(SigmaInf, RescalingLaw) {
  const auto w = make_shell_bump();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const double X = 1 + 20 * std::uniform_real_distribution<double>(0, 1)(rng);
    const double a = (6 * std::uniform_real_distribution<double>(0, 1)(rng) - 3) * X * X * X;
    const double lhs = sigma_inf(a, X, w), rhs = sigma_inf(a / (X * X * X), 1, w);
    EXPECT_NEAR(lhs, rhs, 1e-6 * std::max(rhs, 1e-12)) << a << " " << X;
  }
}

TEST(SigmaInf, GrowsWithR) {
  const double v2 = sigma_inf(0, 1, make_nu_star(2, false));
  const double v4 = sigma_inf(0, 1, make_nu_star(4, false));
  EXPECT_GT(v4, v2);
  const auto phi = ShellProfile::shared();
  EXPECT_NEAR(v2, (*phi)(0) * std::log(2.0), 1e-5 * v2);
}

TEST(DensityTable, ZeroWeight) {
  const auto t = density_table(make_zero_weight(), 64);
  for (double v : t.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(t(0.5), 0.0);
  EXPECT_THROW(density_table(make_zero_weight(), 63), std::invalid_argument);
}

TEST(DensityTable, NuStarSymmetricAndValidated) {
  const auto w = make_nu_star(2);
  const auto t = density_table(w, 256);
  EXPECT_LT(t.validation().max_rel_error, 1e-3);
  EXPECT_FALSE(t.validation().refined);
  const auto& v = t.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    ASSERT_GE(v[i], 0.0);
    ASSERT_NEAR(v[i], v[v.size() - 1 - i], 1e-9 * t.max_value());
  }
  EXPECT_EQ(t(3.0), 0.0);
  EXPECT_EQ(t(-3.2), 0.0);
  // Independent surface quadrature on both sides.
  EXPECT_NEAR(sigma_inf(1.7, 1, w), sigma_inf(-1.7, 1, w), 1e-5 * t.max_value());
  EXPECT_NEAR(t.at(1.7 * 27, 3), sigma_inf(1.7, 1, w), 1e-4 * t.max_value());
}

TEST(Moments, ZeroWeight) {
  const auto w = make_zero_weight();
  const auto t = density_table(w, 64);
  EXPECT_EQ(pure_l2_moment(w), 0.0);
  EXPECT_EQ(mixed_l1_moment(w, t), 0.0);
}

TEST(Moments, PureEqualsMixedNuStarR2) {
  const auto w = make_nu_star(2);
  const auto t = density_table(w, 256);
  const double pure = pure_l2_moment(w), mixed = mixed_l1_moment(w, t);
  RecordProperty("pure", std::to_string(pure));
  RecordProperty("mixed", std::to_string(mixed));
  EXPECT_LT(std::fabs(pure - mixed) / pure, 1e-3);
}

TEST(Poisson, RiemannSumsAndTrend) {
  const auto w = make_nu_star(2);
  const auto t = density_table(w, 256);
  const double pure = pure_l2_moment(w);
  const auto one = poisson_check(t, pure, 20, 1, 0);
  EXPECT_LT(one.deviation, 1e-5);
  const auto b0 = poisson_check(t, pure, 40, 5, 0), b1 = poisson_check(t, pure, 40, 5, 1);
  EXPECT_LT(b0.interp_deviation, 1e-9);
  EXPECT_LT(b1.interp_deviation, 1e-9);
  EXPECT_NEAR(b0.deviation, b1.deviation, 1e-9);
  for (std::uint64_t N = 1; N <= 8; ++N) {
    double last = 1;
    for (std::uint64_t X : {20u, 40u, 80u}) {
      const auto r = poisson_check(t, pure, X, N, 1);
      EXPECT_LT(r.interp_deviation, last) << N << " " << X;
      last = r.interp_deviation;
      if (X == 80) {
        EXPECT_LT(r.deviation, 1e-2);
      }
    }
  }
}

TEST(DerivativeProbe, FiniteAndConsistent) {
  for (double R : {2.0, 4.0, 8.0}) {
    const auto w = make_nu_star(R);
    const auto d0 = derivative_probe(w, 0, 1.0);
    EXPECT_GE(d0.max_abs, 0.0);
    EXPECT_TRUE(std::isfinite(d0.max_abs));
    const auto d1 = derivative_probe(w, 1, 1.0);
    EXPECT_LT(d1.max_one_sided_gap, 1e-3) << R;
    EXPECT_TRUE(std::isfinite(d1.ratio));
  }
}

TEST(SobolevProbe, ZerothOrderUniformInR) {
  std::vector<double> norms;
  for (double R : {2.0, 8.0, 32.0}) norms.push_back(sobolev_probe(make_nu_star(R, false), 0, 4000, 11).norm[0]);
  const auto [lo, hi] = std::minmax_element(norms.begin(), norms.end());
  EXPECT_LT(*hi / *lo, 2.0);
}

// First derivatives pick up 3 y_l^2 w0'(F0) on the outer shell, so they grow with R.
TEST(SobolevProbe, FirstOrderGrowsWithR) {
  const double n2 = sobolev_probe(make_nu_star(2, false), 1, 2000, 11).norm[1];
  const double n32 = sobolev_probe(make_nu_star(32, false), 1, 2000, 11).norm[1];
  RecordProperty("norm1_R2", std::to_string(n2));
  RecordProperty("norm1_R32", std::to_string(n32));
  EXPECT_GT(n32 / n2, 50.0);
}

TEST(SupportVolume, GrowsLikeLogR) {
  const auto v4 = support_volume(make_nu_star(4, false), 200000, 3);
  const auto v16 = support_volume(make_nu_star(16, false), 200000, 3);
  EXPECT_LT(v16.volume / v4.volume, 3.0);
  EXPECT_GT(v16.volume, v4.volume);
}
