#pragma once

// Exact identity suites shared by the CLI and the acceptance runner.

#include <chrono>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cubes/exp_sums.hpp"
#include "cubes/singular_series.hpp"
#include "cubes/variance.hpp"

namespace cubes {

struct CheckResult {
  std::string name;
  u64 checks = 0;
  std::vector<std::string> failures;  // first few only
  u64 failure_count = 0;
  double seconds = 0;

  bool ok() const { return failure_count == 0; }
  void fail(std::string msg) {
    ++failure_count;
    if (failures.size() < 8) failures.push_back(std::move(msg));
  }
};

struct LocalSuiteConfig {
  u64 pairs = 200;
  u64 pair_bound = 100;
  u64 vanishing_limit = 3000;
  u64 modp_limit = 500;
  u64 lemma_limit = 3000;    // prime powers m <= this for the double/mixed lemmas
  u64 mixed_enum_limit = 30; // m <= this also checked by direct enumeration of e mod m
  u64 unbalanced_limit = 12;
  u64 divisor_limit = 100;
  u64 seed = 2024;

  static LocalSuiteConfig capped(u64 max_modulus) {
    LocalSuiteConfig c;
    auto cap = [&](u64& v) { v = std::min(v, max_modulus); };
    cap(c.pair_bound);
    cap(c.vanishing_limit);
    cap(c.modp_limit);
    cap(c.lemma_limit);
    cap(c.mixed_enum_limit);
    cap(c.unbalanced_limit);
    cap(c.divisor_limit);
    return c;
  }
};

namespace detail {

inline CheckResult timed(std::string name, const std::function<void(CheckResult&)>& body) {
  CheckResult r;
  r.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline std::string tag(std::initializer_list<u64> v) {
  std::string s;
  for (u64 x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return "(" + s + ")";
}

inline BigInt babs(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

inline std::vector<std::pair<u64, int>> prime_powers_up_to(u64 limit, int min_level = 1) {
  std::vector<std::pair<u64, int>> out;
  for (u64 p : primes_up_to(limit))
    for (int l = min_level; ipow(p, l) <= limit; ++l) out.emplace_back(p, l);
  return out;
}

}  // namespace detail

inline CheckResult check_multiplicativity(const LocalSuiteConfig& c, TTable& table) {
  return detail::timed("T multiplicative on coprime pairs", [&](CheckResult& r) {
    std::mt19937_64 rng(c.seed);
    u64 pairs = 0;
    if (c.pair_bound < 2) return;
    while (pairs < c.pairs) {
      const u64 n1 = rng() % c.pair_bound + 1, n2 = rng() % c.pair_bound + 1;
      if (std::gcd(n1, n2) != 1) continue;
      const auto& t12 = table.full(n1 * n2);
      const auto& t1 = table.full(n1);
      const auto& t2 = table.full(n2);
      for (u64 a = 0; a < n1 * n2; ++a) {
        ++r.checks;
        if (t12.values[a] != t1.values[a % n1] * t2.values[a % n2]) r.fail("pair " + detail::tag({n1, n2, a}));
      }
      ++pairs;
    }
  });
}

inline CheckResult check_vanishing(const LocalSuiteConfig& c, TTable& table) {
  return detail::timed("T_a(p^l) = 0 unless p^{l-1} | 3a", [&](CheckResult& r) {
    for (const auto& [p, l] : detail::prime_powers_up_to(c.vanishing_limit, 2)) {
      const auto& t = table.prime_power(p, l);
      const u64 pl1 = ipow(p, l - 1);
      for (u64 a = 0; a < t.modulus; ++a) {
        if ((3 * a) % pl1 == 0) continue;
        ++r.checks;
        if (t.values[a] != 0) r.fail("p^l a " + detail::tag({p, u64(l), a}));
      }
    }
  });
}

inline CheckResult check_modp_bounds(const LocalSuiteConfig& c, TTable& table) {
  return detail::timed("mod-p bounds 6+2p^-1/2, 6 sqrt p, 0.99 p", [&](CheckResult& r) {
    for (u64 p : primes_up_to(c.modp_limit)) {
      const auto& t = table.prime_power(p, 1);
      const BigInt P(p);
      for (u64 a = 0; a < p; ++a) {
        const BigInt T = detail::babs(BigInt(t.values[a]));
        ++r.checks;
        if ((3 * a) % p != 0) {
          // |T^nat| <= 6 + 2 p^{-1/2}, i.e. |T| <= 6 p^2 + 2 p^{3/2}
          const BigInt excess = T - 6 * P * P;
          if (excess > 0 && excess * excess > 4 * P * P * P) r.fail("generic " + detail::tag({p, a}));
        } else if (T * T > 36 * big_pow(P, 5)) {
          r.fail("p | 3a " + detail::tag({p, a}));
        }
        if (p >= 7) {
          ++r.checks;
          if (100 * T >= 99 * big_pow(P, 3)) r.fail("0.99p " + detail::tag({p, a}));
        }
      }
    }
  });
}

inline CheckResult check_double_t(const LocalSuiteConfig& c, TTable& table) {
  return detail::timed("double T_b lemma", [&](CheckResult& r) {
    for (const auto& [p, f] : detail::prime_powers_up_to(c.lemma_limit)) {
      const u64 m = ipow(p, f);
      for (int e = 0; e <= f; ++e) {
        const u64 d = ipow(p, e);
        Rational lhs = 0, abs_sum = 0;
        for (int l1 = 0; l1 <= f; ++l1) {
          const u64 n1 = ipow(p, l1);
          if (std::lcm(n1, d) != m) continue;
          for (int l2 = 0; l2 <= f; ++l2) {
            const u64 n2 = ipow(p, l2);
            if (std::lcm(n2, d) != m) continue;
            const Rational v = detail::pure_term(table.full(n1), table.full(n2), d, m);
            lhs += v;
            abs_sum += abs(v);
          }
        }
        Rational bound = 0;
        for (int k = 0; k <= e; ++k) {
          const u64 n = m / ipow(p, k);
          bound += Rational(detail::babs(s_plus_zero(n, 1, table)), detail::cube(n) * detail::cube(n));
        }
        bound *= f + 1;
        r.checks += 2;
        if (lhs != Rational(s_plus_zero(m, d, table), detail::cube(m) * detail::cube(m)))
          r.fail("identity " + detail::tag({p, u64(f), u64(e)}));
        if (abs_sum > bound) r.fail("bound " + detail::tag({p, u64(f), u64(e)}));
      }
    }
  });
}

inline CheckResult check_mixed_t(const LocalSuiteConfig& c, TTable& table) {
  return detail::timed("mixed T_b lemma", [&](CheckResult& r) {
    for (const auto& [p, f] : detail::prime_powers_up_to(c.lemma_limit)) {
      const u64 m = ipow(p, f);
      const auto& counts = table.point_counts(m);
      for (int e = 0; e <= f; ++e) {
        const u64 d = ipow(p, e);
        Rational lhs = 0, abs_sum = 0, enumerated = 0;
        for (int l = 0; l <= f; ++l) {
          const u64 n = ipow(p, l);
          if (std::lcm(n, d) != m) continue;
          const TVector& t = table.full(n);
          const Rational v = detail::mixed_term(counts, t, d);
          lhs += v;
          abs_sum += abs(v);
          if (m <= c.mixed_enum_limit) {
            BigInt acc = 0;
            for (u64 e1 = 0; e1 < m; ++e1)
              for (u64 e2 = 0; e2 < m; ++e2)
                for (u64 e3 = 0; e3 < m; ++e3) {
                  const u64 v3 = (e1 * e1 * e1 + e2 * e2 * e2 + e3 * e3 * e3) % m;
                  if (v3 % d == 0) acc += t.at(i64(v3));
                }
            enumerated += Rational(acc, detail::cube(m) * detail::cube(n));
          }
        }
        Rational bound = 0;
        for (int k = 0; k <= e; ++k) {
          const u64 n = m / ipow(p, k);
          bound += Rational(detail::babs(s_plus_zero(n, 1, table)), detail::cube(n) * detail::cube(n));
        }
        bound *= (f + 1) * d;
        const Rational target(s_plus_zero(m, d, table), detail::cube(m) * detail::cube(m));
        r.checks += 2;
        if (lhs != target) r.fail("identity " + detail::tag({p, u64(f), u64(e)}));
        if (abs_sum > bound) r.fail("bound " + detail::tag({p, u64(f), u64(e)}));
        if (m <= c.mixed_enum_limit) {
          ++r.checks;
          if (enumerated != target) r.fail("enumeration " + detail::tag({p, u64(f), u64(e)}));
        }
      }
    }
  });
}

inline CheckResult check_unbalanced(const LocalSuiteConfig& c, TTable& table) {
  return detail::timed("unbalanced pairs vanish", [&](CheckResult& r) {
    const u64 L = c.unbalanced_limit;
    for (u64 n1 = 1; n1 <= L; ++n1)
      for (u64 n2 = 1; n2 <= L; ++n2)
        for (u64 d = 1; d <= L; ++d) {
          if (std::lcm(n1, d) == std::lcm(n2, d)) continue;
          ++r.checks;
          if (detail::t_pair_sum(table.full(n1), table.full(n2), d, n1 * n2) != 0)
            r.fail("pair " + detail::tag({n1, n2, d}));
        }
  });
}

inline CheckResult check_generic_bound(const LocalSuiteConfig& c, TTable& table) {
  return detail::timed("|S+_0(n;d)| <= |S+_0(n;1)|", [&](CheckResult& r) {
    for (const auto& [p, f] : detail::prime_powers_up_to(c.lemma_limit)) {
      const u64 m = ipow(p, f);
      const BigInt s1 = detail::babs(s_plus_zero(m, 1, table));
      for (int e = 0; e < f; ++e)
        for (u64 other : {1u, 2u, 3u, 5u, 7u}) {
          if (other != 1 && other % p == 0) continue;
          const u64 d = ipow(p, e) * other;
          ++r.checks;
          if (detail::babs(s_plus_zero(m, d, table)) > s1) r.fail("n d " + detail::tag({m, d}));
        }
    }
  });
}

inline CheckResult check_divisor_identity(const LocalSuiteConfig& c, TTable& table) {
  return detail::timed("N_a(q)/q^2 = sum_{n|q} T_a(n)/n^3", [&](CheckResult& r) {
    for (u64 q = 1; q <= c.divisor_limit; ++q) {
      const auto& n = table.point_counts(q);
      const auto divs = divisors(q);
      for (u64 a = 0; a < q; ++a) {
        Rational rhs = 0;
        for (u64 d : divs) rhs += Rational(table.value_big(i64(a), d), detail::cube(d));
        ++r.checks;
        if (Rational(BigInt(n[a]), BigInt(q) * q) != rhs) r.fail("q a " + detail::tag({q, a}));
      }
    }
  });
}

inline std::vector<CheckResult> local_suite(const LocalSuiteConfig& c, TTable& table = default_table()) {
  return {check_multiplicativity(c, table), check_vanishing(c, table),  check_modp_bounds(c, table),
          check_double_t(c, table),         check_mixed_t(c, table),    check_unbalanced(c, table),
          check_generic_bound(c, table),    check_divisor_identity(c, table)};
}

// Reference values computed two ways: point-count convolution and the defining sums.
inline std::vector<CheckResult> ground_suite(TTable& table = default_table()) {
  std::vector<CheckResult> out;
  auto both = [&](CheckResult& r, i64 a, u64 n, i64 expected) {
    r.checks += 2;
    if (table.value(a, n) != expected) r.fail("convolution T_" + std::to_string(a) + "(" + std::to_string(n) + ")");
    if (std::llround(t_definitional(a, n)) != expected)
      r.fail("definition T_" + std::to_string(a) + "(" + std::to_string(n) + ")");
  };
  out.push_back(detail::timed("T_0(7) = 42, T_1(7) = 287", [&](CheckResult& r) {
    both(r, 0, 7, 42);
    both(r, 1, 7, 287);
  }));
  out.push_back(detail::timed("T_b(4) and T_b(8) patterns", [&](CheckResult& r) {
    for (i64 b = 0; b < 4; ++b) both(r, b, 4, b == 0 ? 16 : b == 2 ? -16 : 0);
    for (i64 b = 0; b < 8; ++b) both(r, b, 8, b == 0 ? 256 : b == 4 ? -256 : 0);
  }));
  out.push_back(detail::timed("S+_0(4;2) = S+_0(4;1) = 128", [&](CheckResult& r) {
    for (u64 d : {1u, 2u}) {
      r.checks += 2;
      if (s_plus_zero(4, d, table) != 128) r.fail("multiplicative route d=" + std::to_string(d));
      if (s_plus_zero_brute(4, d) != 128) r.fail("enumeration d=" + std::to_string(d));
    }
  }));
  out.push_back(detail::timed("s_0(4) = 5/4", [&](CheckResult& r) {
    r.checks += 2;
    if (s_exact(0, 4, table) != Rational(5, 4)) r.fail("table route");
    Rational direct = 0;
    for (u64 n = 1; n <= 4; ++n) direct += Rational(std::llround(t_definitional(0, n)), detail::cube(n));
    if (direct != Rational(5, 4)) r.fail("definition route");
  }));
  return out;
}

inline std::vector<CheckResult> moment_suite(u64 K_max = 48, u64 d_max = 8, TTable& table = default_table()) {
  std::vector<CheckResult> out;
  out.push_back(detail::timed("truncated moment regrouping", [&](CheckResult& r) {
    for (u64 d = 1; d <= d_max; ++d)
      for (u64 K = 1; K <= K_max; ++K) {
        const auto c = nonarch_moment_check(K, d, table);
        ++r.checks;
        for (const auto& f : c.failures) r.fail("K d " + detail::tag({K, d}) + ": " + f);
      }
  }));
  return out;
}

inline bool all_ok(const std::vector<CheckResult>& v) {
  for (const auto& r : v)
    if (!r.ok()) return false;
  return true;
}

}  // namespace cubes
