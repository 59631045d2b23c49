#pragma once

// Exact integer utilities: factorization, multiplicative functions, CRT,
// square-full / cube-full parts.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cubes {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

struct PrimePower {
  u64 p = 0;
  int e = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// A positive integer together with its canonical factorization.
struct Factored {
  u64 value = 1;
  std::vector<PrimePower> factors;  // primes strictly increasing, e >= 1
};

struct PartDecomposition {
  u64 n = 1;
  u64 sq = 1;   // square-full part
  u64 cub = 1;  // cube-full part
};

/// Residue class `value mod modulus`, 0 <= value < modulus.
struct Residue {
  u64 value = 0;
  u64 modulus = 1;

  friend bool operator==(const Residue&, const Residue&) = default;
};

inline u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// Least nonnegative residue of a (possibly negative) integer.
inline u64 mod_floor(i64 a, u64 m) {
  assert(m > 0);
  const i128 r = static_cast<i128>(a) % static_cast<i128>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i128>(m) : r);
}

inline u64 ipow(u64 base, int exp) {
  u64 r = 1;
  for (int i = 0; i < exp; ++i) {
    assert(base == 0 || r <= UINT64_MAX / base);
    r *= base;
  }
  return r;
}

/// Checked power; throws std::overflow_error if base^exp does not fit in 63 bits.
inline u64 checked_pow(u64 base, int exp) {
  u128 r = 1;
  for (int i = 0; i < exp; ++i) {
    r *= base;
    if (r > static_cast<u128>(INT64_MAX)) {
      throw std::overflow_error("checked_pow: " + std::to_string(base) + "^" + std::to_string(exp) +
                                " exceeds 63 bits");
    }
  }
  return static_cast<u64>(r);
}

namespace detail {

inline constexpr u64 kSieveLimit = 1'000'000;

inline const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    std::vector<bool> composite(kSieveLimit + 1, false);
    std::vector<std::uint32_t> out;
    for (u64 i = 2; i <= kSieveLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(static_cast<std::uint32_t>(i));
      for (u64 j = i * i; j <= kSieveLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

inline bool miller_rabin(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic witness set for 64-bit inputs.
  for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
    u64 x = powmod(a % n, d, n);
    if (a % n == 0 || x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline u64 pollard_rho(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    auto f = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };
    u64 x = 2, y = 2, d = 1;
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

inline void factor_large(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (miller_rabin(n)) {
    out.push_back(n);
    return;
  }
  const u64 d = pollard_rho(n);
  factor_large(d, out);
  factor_large(n / d, out);
}

}  // namespace detail

inline bool is_prime(u64 n) {
  if (n <= detail::kSieveLimit) {
    const auto& ps = detail::small_primes();
    return std::binary_search(ps.begin(), ps.end(), static_cast<std::uint32_t>(n));
  }
  return detail::miller_rabin(n);
}

/// All primes p <= limit (limit <= 10^6 served from the shared sieve).
inline std::vector<u64> primes_up_to(u64 limit) {
  std::vector<u64> out;
  if (limit <= detail::kSieveLimit) {
    for (auto p : detail::small_primes()) {
      if (p > limit) break;
      out.push_back(p);
    }
    return out;
  }
  std::vector<bool> composite(limit + 1, false);
  for (u64 i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

inline Factored factor(u64 n) {
  if (n == 0) throw std::invalid_argument("factor: n must be positive");
  if (n > static_cast<u64>(INT64_MAX)) throw std::invalid_argument("factor: n exceeds 2^63-1");
  Factored f;
  f.value = n;
  u64 rest = n;
  for (std::uint32_t p32 : detail::small_primes()) {
    const u64 p = p32;
    if (p * p > rest) break;
    if (rest % p != 0) continue;
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    f.factors.push_back({p, e});
  }
  if (rest > 1) {
    std::vector<u64> big;
    detail::factor_large(rest, big);
    std::sort(big.begin(), big.end());
    for (u64 p : big) {
      if (!f.factors.empty() && f.factors.back().p == p) {
        ++f.factors.back().e;
      } else {
        f.factors.push_back({p, 1});
      }
    }
  }
  return f;
}

inline int valuation(u64 n, u64 p) {
  assert(n > 0 && p > 1);
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

inline u64 euler_phi(const Factored& f) {
  u64 r = 1;
  for (auto [p, e] : f.factors) r *= (p - 1) * ipow(p, e - 1);
  return r;
}

inline u64 num_divisors(const Factored& f) {
  u64 r = 1;
  for (auto pe : f.factors) r *= static_cast<u64>(pe.e + 1);
  return r;
}

inline int moebius(const Factored& f) {
  for (auto pe : f.factors) {
    if (pe.e > 1) return 0;
  }
  return f.factors.size() % 2 == 0 ? 1 : -1;
}

inline int omega(const Factored& f) { return static_cast<int>(f.factors.size()); }

inline u64 radical(const Factored& f) {
  u64 r = 1;
  for (auto pe : f.factors) r *= pe.p;
  return r;
}

inline u64 euler_phi(u64 n) { return euler_phi(factor(n)); }
inline u64 num_divisors(u64 n) { return num_divisors(factor(n)); }
inline int moebius(u64 n) { return moebius(factor(n)); }
inline int omega(u64 n) { return omega(factor(n)); }
inline u64 radical(u64 n) { return radical(factor(n)); }

/// All positive divisors, ascending.
inline std::vector<u64> divisors(const Factored& f) {
  std::vector<u64> ds{1};
  for (auto [p, e] : f.factors) {
    const std::size_t base = ds.size();
    u64 pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) ds.push_back(ds[i] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

inline std::vector<u64> divisors(u64 n) { return divisors(factor(n)); }

inline PartDecomposition sq_cub_parts(const Factored& f) {
  PartDecomposition d;
  d.n = f.value;
  for (auto [p, e] : f.factors) {
    if (e >= 2) d.sq *= ipow(p, e);
    if (e >= 3) d.cub *= ipow(p, e);
  }
  return d;
}

inline PartDecomposition sq_cub_parts(u64 n) { return sq_cub_parts(factor(n)); }

inline u64 abs_u64(i64 a) {
  return a < 0 ? static_cast<u64>(-(a + 1)) + 1 : static_cast<u64>(a);
}

/// a is in S(D): a != 0 and sq(|a|) <= D.
inline bool in_square_full_class(i64 a, u64 bound) {
  return a != 0 && sq_cub_parts(abs_u64(a)).sq <= bound;
}

/// a is in C(D): a != 0 and cub(|a|) <= D.
inline bool in_cube_full_class(i64 a, u64 bound) {
  return a != 0 && sq_cub_parts(abs_u64(a)).cub <= bound;
}

/// a is not congruent to +-4 mod 9.
inline bool is_admissible(i64 a) {
  const u64 r = mod_floor(a, 9);
  return r != 4 && r != 5;
}

namespace detail {

// Returns (g, x) with x*a == g mod m.
inline std::pair<u64, u64> inverse_part(u64 a, u64 m) {
  i128 old_r = static_cast<i128>(a % m), r = static_cast<i128>(m);
  i128 old_s = 1, s = 0;
  while (r != 0) {
    const i128 q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
  }
  i128 x = old_s % static_cast<i128>(m);
  if (x < 0) x += m;
  return {static_cast<u64>(old_r), static_cast<u64>(x)};
}

}  // namespace detail

inline u64 inverse_mod(u64 a, u64 m) {
  if (m == 1) return 0;
  auto [g, x] = detail::inverse_part(a, m);
  if (g != 1) throw std::domain_error("inverse_mod: not invertible");
  return x;
}

/// Combine residues with pairwise coprime moduli into one class mod their product.
inline Residue crt_combine(const std::vector<std::pair<i64, u64>>& residue_pairs) {
  for (std::size_t i = 0; i < residue_pairs.size(); ++i) {
    if (residue_pairs[i].second == 0) throw std::invalid_argument("crt_combine: zero modulus");
    for (std::size_t j = i + 1; j < residue_pairs.size(); ++j) {
      const u64 mi = residue_pairs[i].second, mj = residue_pairs[j].second;
      if (std::gcd(mi, mj) != 1) {
        throw std::invalid_argument("crt_combine: moduli " + std::to_string(mi) + " (index " +
                                    std::to_string(i) + ") and " + std::to_string(mj) +
                                    " (index " + std::to_string(j) + ") are not coprime");
      }
    }
  }
  Residue acc{0, 1};
  for (auto [r, m] : residue_pairs) {
    const u128 prod = static_cast<u128>(acc.modulus) * m;
    if (prod > static_cast<u128>(INT64_MAX)) throw std::overflow_error("crt_combine: modulus overflow");
    const u64 target = mod_floor(r, m);
    // acc.value + acc.modulus * t == target (mod m)
    const u64 diff = (target + m - acc.value % m) % m;
    const u64 t = mulmod(diff, inverse_mod(acc.modulus % m, m), m);
    acc.value = static_cast<u64>(acc.value + static_cast<u128>(acc.modulus) * t);
    acc.modulus = static_cast<u64>(prod);
    acc.value %= acc.modulus;
  }
  return acc;
}

/// lcm with overflow check.
inline u64 lcm_checked(u64 a, u64 b) {
  const u128 r = static_cast<u128>(a / std::gcd(a, b)) * b;
  if (r > static_cast<u128>(INT64_MAX)) throw std::overflow_error("lcm overflow");
  return static_cast<u64>(r);
}

}  // namespace cubes
