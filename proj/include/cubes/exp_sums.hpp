#pragma once

// Point counts N_a(m), complete exponential sums T_a(n), the twisted sums
// S+_0(n;d), local densities and the singular series of the pair equation.
//
// Conventions: F_0(y) = y1^3 + y2^3 + y3^3, e_n(x) = exp(2 pi i x / n),
// T_a(n) = sum_{u in (Z/n)^x} sum_{y in (Z/n)^3} e_n(u (F_0(y) - a)).

#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "cubes/arith.hpp"
#include "cubes/ntt.hpp"
#include "cubes/rational.hpp"
#include "cubes/t_cache.hpp"

namespace cubes {

struct CubeCountVector {
  u64 modulus = 1;
  std::vector<u64> counts;  // counts[v] = #{y mod m : y^3 = v}
};

struct TVector {
  u64 modulus = 1;
  std::vector<i64> values;

  i64 at(i64 a) const { return values[mod_floor(a, modulus)]; }
};

enum class DensityRoute { enumeration, hensel };

struct LocalDensity {
  u64 p = 0;
  int level = 0;
  Rational value;
  DensityRoute route = DensityRoute::enumeration;
};

inline CubeCountVector cube_counts(u64 m) {
  if (m == 0) throw std::invalid_argument("cube_counts: modulus must be positive");
  CubeCountVector out{m, std::vector<u64>(m, 0)};
  for (u64 y = 0; y < m; ++y) ++out.counts[mulmod(mulmod(y, y, m), y, m)];
  return out;
}

/// [N_a(m)]_{a mod m} as the triple cyclic self-convolution of the cube counts.
inline std::vector<u64> point_count_vector(u64 m) {
  const auto c = cube_counts(m);
  const auto c2 = ntt::cyclic_convolve(c.counts, c.counts);
  return ntt::cyclic_convolve(c2, c.counts);
}

namespace detail {

inline i64 narrow_checked(i128 v, const char* what) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error(std::string(what) + ": exceeds 63 bits");
  return static_cast<i64>(v);
}

/// T_a(p^l) = p^l N_a(p^l) - p^{l+2} N_a(p^{l-1}) from the two point-count vectors.
inline TVector t_from_counts(u64 p, const std::vector<u64>& n_top,
                             const std::vector<u64>& n_below) {
  const u64 m = n_top.size();
  const u64 lower = n_below.size();
  const i128 pl = static_cast<i128>(m);
  const i128 pl2 = pl * static_cast<i128>(p) * static_cast<i128>(p);
  TVector t{m, std::vector<i64>(m)};
  for (u64 a = 0; a < m; ++a) {
    const i128 v = pl * static_cast<i128>(n_top[a]) - pl2 * static_cast<i128>(n_below[a % lower]);
    t.values[a] = narrow_checked(v, "t_prime_power");
  }
  return t;
}

}  // namespace detail

/// T-vector for the prime power p^l, computed from point counts (no caching).
inline TVector t_prime_power(u64 p, int l) {
  if (l < 1) throw std::invalid_argument("t_prime_power: exponent must be >= 1");
  if (!is_prime(p)) throw std::invalid_argument("t_prime_power: " + std::to_string(p) + " is not prime");
  const u64 m = checked_pow(p, l);
  const auto top = point_count_vector(m);
  const auto below = l == 1 ? std::vector<u64>{1} : point_count_vector(m / p);
  return detail::t_from_counts(p, top, below);
}

/// Definitional value of T_a(n) by the direct sum over units and points in
/// floating point. The points are first grouped by F_0(y) mod n. Oracle for
/// small n only.
inline double t_definitional(i64 a, u64 n) {
  const u64 ar = mod_floor(a, n);
  std::vector<u64> hist(n, 0);
  for (u64 y1 = 0; y1 < n; ++y1)
    for (u64 y2 = 0; y2 < n; ++y2)
      for (u64 y3 = 0; y3 < n; ++y3) ++hist[(y1 * y1 % n * y1 + y2 * y2 % n * y2 + y3 * y3 % n * y3) % n];
  long double total = 0;
  const long double two_pi = 2 * std::numbers::pi_v<long double>;
  for (u64 u = 1; u <= n; ++u) {
    if (std::gcd(u % n, n) != 1) continue;
    for (u64 v = 0; v < n; ++v) {
      if (hist[v] == 0) continue;
      const u64 f = (v + n - ar) % n;
      total += hist[v] * std::cos(two_pi * static_cast<long double>(mulmod(u % n, f, n)) / n);
    }
  }
  return static_cast<double>(total);
}

/// Memoized T-vectors, point counts and local S+_0 factors. Optionally backed
/// by the on-disk prime-power cache. Returned references stay valid for the
/// lifetime of the table. Safe to share between threads.
class TTable {
 public:
  TTable() = default;
  explicit TTable(std::optional<std::filesystem::path> cache_dir) : cache_dir_(std::move(cache_dir)) {}

  TTable(const TTable&) = delete;
  TTable& operator=(const TTable&) = delete;

  const std::optional<std::filesystem::path>& cache_dir() const { return cache_dir_; }

  const std::vector<u64>& point_counts(u64 m) {
    std::lock_guard lock(mu_);
    auto it = counts_.find(m);
    if (it != counts_.end()) return *it->second;
    auto v = std::make_unique<std::vector<u64>>(point_count_vector(m));
    return *counts_.emplace(m, std::move(v)).first->second;
  }

  const TVector& prime_power(u64 p, int l) {
    std::lock_guard lock(mu_);
    const auto key = std::make_pair(p, l);
    auto it = prime_powers_.find(key);
    if (it != prime_powers_.end()) return *it->second;
    if (l < 1 || !is_prime(p)) throw std::invalid_argument("TTable::prime_power: expected a prime power");
    const u64 m = checked_pow(p, l);
    std::unique_ptr<TVector> t;
    if (cache_dir_) {
      if (auto cached = read_cache_entry(cache_file_path(*cache_dir_, p, l), p, l)) {
        t = std::make_unique<TVector>(TVector{m, std::move(*cached)});
      }
    }
    if (!t) {
      const auto& top = point_counts(m);
      const std::vector<u64> one{1};
      const auto& below = l == 1 ? one : point_counts(m / p);
      t = std::make_unique<TVector>(detail::t_from_counts(p, top, below));
      if (cache_dir_) write_cache_entry(cache_file_path(*cache_dir_, p, l), p, l, t->values);
    }
    return *prime_powers_.emplace(key, std::move(t)).first->second;
  }

  /// T_a(n) by multiplicativity; throws std::overflow_error beyond 63 bits.
  i64 value(i64 a, u64 n) {
    if (n == 0) throw std::invalid_argument("TTable::value: modulus must be positive");
    i128 acc = 1;
    for (const auto& [p, e] : factor(n).factors) {
      const i64 t = prime_power(p, e).at(a);
      if (t == 0) return 0;
      acc *= t;
      if (acc > INT64_MAX || acc < -INT64_MAX) {
        throw std::overflow_error("T_" + std::to_string(a) + "(" + std::to_string(n) + ") exceeds 63 bits");
      }
    }
    return static_cast<i64>(acc);
  }

  BigInt value_big(i64 a, u64 n) {
    BigInt acc = 1;
    for (const auto& [p, e] : factor(n).factors) acc *= prime_power(p, e).at(a);
    return acc;
  }

  /// Full T-vector mod n (memoized).
  const TVector& full(u64 n) {
    std::lock_guard lock(mu_);
    auto it = full_.find(n);
    if (it != full_.end()) return *it->second;
    const Factored f = factor(n);
    auto t = std::make_unique<TVector>(TVector{n, std::vector<i64>(n, 1)});
    for (const auto& [p, e] : f.factors) {
      const TVector& local = prime_power(p, e);
      for (u64 a = 0; a < n; ++a) {
        const i128 v = static_cast<i128>(t->values[a]) * local.values[a % local.modulus];
        if (v > INT64_MAX || v < -INT64_MAX) {
          throw std::overflow_error("t_full(" + std::to_string(n) + "): entry exceeds 63 bits");
        }
        t->values[a] = static_cast<i64>(v);
      }
    }
    return *full_.emplace(n, std::move(t)).first->second;
  }

  /// S+_0(p^f; p^e) for a single prime.
  const BigInt& s_plus_local(u64 p, int f, int e) {
    std::lock_guard lock(mu_);
    const auto key = std::make_tuple(p, f, e);
    auto it = s_plus_.find(key);
    if (it != s_plus_.end()) return it->second;
    return s_plus_.emplace(key, compute_s_plus_local(p, f, e)).first->second;
  }

 private:
  BigInt compute_s_plus_local(u64 p, int f, int e) {
    if (e > f) return 0;
    if (f == 0) return 1;
    const u64 m = checked_pow(p, f);
    if (e == f) {
      const BigInt n0 = point_counts(m)[0];
      return BigInt(m) * n0 * n0;
    }
    const TVector& t = prime_power(p, f);
    const u64 step = ipow(p, e);
    BigInt sum = 0;
    for (u64 b = 0; b < m; b += step) {
      const BigInt tb = t.values[b];
      sum += tb * tb;
    }
    BigInt q, r;
    boost::multiprecision::divide_qr(sum, BigInt(m), q, r);
    if (r != 0) throw std::logic_error("s_plus_zero: sum of T_b^2 not divisible by p^f");
    return q;
  }

  std::optional<std::filesystem::path> cache_dir_;
  std::recursive_mutex mu_;
  std::map<u64, std::unique_ptr<std::vector<u64>>> counts_;
  std::map<std::pair<u64, int>, std::unique_ptr<TVector>> prime_powers_;
  std::map<u64, std::unique_ptr<TVector>> full_;
  std::map<std::tuple<u64, int, int>, BigInt> s_plus_;
};

/// Process-wide table, lazily configured from the cache environment variable.
inline TTable& default_table() {
  static TTable table(resolve_cache_dir(""));
  return table;
}

inline TVector t_full(const Factored& n, TTable& table = default_table()) { return table.full(n.value); }

/// S+_0(n; d), an integer; zero unless d | n.
inline BigInt s_plus_zero(u64 n, u64 d, TTable& table = default_table()) {
  if (n == 0 || d == 0) throw std::invalid_argument("s_plus_zero: arguments must be positive");
  if (n % d != 0) return 0;
  BigInt acc = 1;
  for (const auto& [p, f] : factor(n).factors) {
    acc *= table.s_plus_local(p, f, valuation(d, p));
    if (acc == 0) return 0;
  }
  return acc;
}

inline constexpr u64 kBruteSPlusLimit = 200;

/// S+_0(n; d) straight from the definition: sum over m with lcm(m, d) = n and
/// units u mod m of |sum_{y mod n, d | F_0(y)} e_m(u F_0(y))|^2.
inline BigInt s_plus_zero_brute(u64 n, u64 d) {
  if (n == 0 || d == 0) throw std::invalid_argument("s_plus_zero_brute: arguments must be positive");
  if (n * d > kBruteSPlusLimit) {
    throw std::invalid_argument("s_plus_zero_brute: n*d = " + std::to_string(n * d) + " exceeds " +
                                std::to_string(kBruteSPlusLimit));
  }
  if (n % d != 0) return 0;
  std::vector<u64> hist(n, 0);
  for (u64 y1 = 0; y1 < n; ++y1) {
    for (u64 y2 = 0; y2 < n; ++y2) {
      for (u64 y3 = 0; y3 < n; ++y3) {
        const u64 v = (y1 * y1 % n * y1 + y2 * y2 % n * y2 + y3 * y3 % n * y3) % n;
        if (v % d == 0) ++hist[v];
      }
    }
  }
  const long double two_pi = 2 * std::numbers::pi_v<long double>;
  long double total = 0;
  for (u64 m = 1; m <= n; ++m) {
    if (n % m != 0 || std::lcm(m, d) != n) continue;
    for (u64 u = 0; u < m; ++u) {
      if (std::gcd(u, m) != 1) continue;
      long double re = 0, im = 0;
      for (u64 v = 0; v < n; ++v) {
        if (hist[v] == 0) continue;
        const long double angle = two_pi * static_cast<long double>(u * v % m) / m;
        re += hist[v] * std::cos(angle);
        im += hist[v] * std::sin(angle);
      }
      total += re * re + im * im;
    }
  }
  const long double rounded = std::round(total);
  if (std::fabs(total - rounded) > 1e-6L * std::max<long double>(1, std::fabs(total))) {
    throw std::logic_error("s_plus_zero_brute: non-integral floating sum");
  }
  return BigInt(static_cast<long long>(rounded));
}

/// Level sequence N_0(p^l) / p^{2l}, l = 1..max_level. No limit is claimed.
inline std::vector<Rational> sigma_p_zero_levels(u64 p, int max_level, TTable& table = default_table()) {
  std::vector<Rational> out;
  for (int l = 1; l <= max_level; ++l) {
    const u64 m = checked_pow(p, l);
    out.emplace_back(Rational(BigInt(table.point_counts(m)[0]), BigInt(m) * m));
  }
  return out;
}

inline constexpr u64 kEnumerationModulusLimit = 1u << 16;

namespace detail {

/// Level from which N_a(p^l)/p^{2l} is constant by Hensel lifting.
inline int certified_level(u64 p, i64 a) {
  const int v = valuation(abs_u64(a), p);
  return p == 3 ? v + 3 : v + 1;
}

inline Rational sigma_hensel(u64 p, i64 a, TTable& table) {
  // Nonzero solutions mod p lift uniquely; the zero solution needs p^3 | a.
  const auto& n = table.point_counts(p);
  const u64 r = mod_floor(a, p);
  const u64 nonzero = n[r] - (r == 0 ? 1 : 0);
  Rational value(BigInt(nonzero), BigInt(p) * p);
  const i64 p3 = static_cast<i64>(p * p * p);
  if (p * p * p <= static_cast<u64>(INT64_MAX) && a % p3 == 0) value += sigma_hensel(p, a / p3, table);
  return value;
}

}  // namespace detail

/// sigma_{p,a} = lim_l p^{-2l} N_a(p^l), a != 0.
inline LocalDensity sigma_p_a(u64 p, i64 a, TTable& table = default_table()) {
  if (a == 0) throw std::invalid_argument("sigma_p_a: a = 0 has no stabilized value; use sigma_p_zero_levels");
  if (!is_prime(p)) throw std::invalid_argument("sigma_p_a: " + std::to_string(p) + " is not prime");
  const int certified = detail::certified_level(p, a);
  const int bound = valuation(3 * abs_u64(a), p) + 3;
  u128 top = 1;
  for (int i = 0; i <= certified; ++i) top *= p;
  if (top <= kEnumerationModulusLimit) {
    auto level_value = [&](int l) {
      const u64 m = ipow(p, l);
      return Rational(BigInt(table.point_counts(m)[mod_floor(a, m)]), BigInt(m) * m);
    };
    Rational prev = level_value(1);
    for (int l = 1; l <= bound; ++l) {
      if (static_cast<u128>(ipow(p, l)) * p > kEnumerationModulusLimit) break;
      Rational next = level_value(l + 1);
      if (l >= certified && next == prev) return {p, l, prev, DensityRoute::enumeration};
      prev = std::move(next);
    }
    throw std::logic_error("sigma_p_a: no stabilization for p=" + std::to_string(p) + ", a=" + std::to_string(a));
  }
  if (p == 3) {
    throw std::out_of_range("sigma_p_a: 3-adic valuation of a too large for enumeration");
  }
  return {p, certified, detail::sigma_hensel(p, a, table), DensityRoute::hensel};
}

/// sigma_{p,a} through the Hensel reduction only (p != 3). Cross-check route.
inline Rational sigma_p_a_hensel(u64 p, i64 a, TTable& table = default_table()) {
  if (a == 0 || p == 3) throw std::invalid_argument("sigma_p_a_hensel: needs a != 0 and p != 3");
  return detail::sigma_hensel(p, a, table);
}

/// Local factor sigma_p(d) truncated at level `level`: sum_{f <= level} S+_0(p^f; p^e) / p^{6f}.
inline Rational sigma_p_d(u64 p, int e, int level, TTable& table = default_table()) {
  Rational sum = 0;
  for (int f = e; f <= level; ++f) {
    const BigInt denom = big_pow(BigInt(p), 6 * static_cast<unsigned>(f));
    sum += Rational(table.s_plus_local(p, f, e), denom);
  }
  return sum;
}

struct SingularSeriesEstimate {
  u64 d = 1;
  u64 n_max = 1;
  Rational partial;             // sum_{n <= n_max, d | n} S+_0(n;d) / n^6
  double value = 0;             // partial as a double
  double tail_heuristic = 0;    // d^{5/3} n_max^{-2/3}, implied constant 1; not a bound
  u64 p_max = 0;
  double euler_product = 0;     // prod_{p <= p_max} sigma_p(d), levels p^f <= max(n_max, d)
};

inline SingularSeriesEstimate singular_series_level_d(u64 d, u64 n_max, u64 p_max = 0,
                                                      TTable& table = default_table()) {
  if (d == 0) throw std::invalid_argument("singular_series_level_d: d must be positive");
  if (n_max < d) throw std::invalid_argument("singular_series_level_d: need n_max >= d");
  if (p_max == 0) p_max = n_max;
  SingularSeriesEstimate out;
  out.d = d;
  out.n_max = n_max;
  out.p_max = p_max;
  for (u64 n = d; n <= n_max; n += d) {
    const BigInt s = s_plus_zero(n, d, table);
    if (s == 0) continue;
    out.partial += Rational(s, big_pow(BigInt(n), 6));
  }
  out.value = to_double(out.partial);
  out.tail_heuristic = std::pow(static_cast<double>(d), 5.0 / 3.0) * std::pow(static_cast<double>(n_max), -2.0 / 3.0);
  const u64 level_cap = std::max(n_max, d);
  double product = 1;
  for (u64 p : primes_up_to(p_max)) {
    const int e = valuation(d, p);
    int level = std::max(e, 1);
    while (static_cast<u128>(ipow(p, level)) * p <= level_cap) ++level;
    product *= to_double(sigma_p_d(p, e, level, table));
  }
  out.euler_product = product;
  return out;
}

/// g(n) = N_0(n) / n^3, assembled multiplicatively.
inline Rational g_density(u64 n, TTable& table = default_table()) {
  if (n == 0) throw std::invalid_argument("g_density: n must be positive");
  Rational g = 1;
  for (const auto& [p, e] : factor(n).factors) {
    const u64 m = checked_pow(p, e);
    g *= Rational(BigInt(table.point_counts(m)[0]), BigInt(m) * m * m);
  }
  return g;
}

}  // namespace cubes
