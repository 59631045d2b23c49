#pragma once

// Exact cyclic convolution of nonnegative integer vectors. Small lengths use
// the O(m^2) direct sum; larger ones go through number-theoretic transforms
// over two 62-bit primes with CRT reconstruction.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "cubes/arith.hpp"

namespace cubes::ntt {

struct NttPrime {
  u64 modulus;
  u64 generator;
};

// 29 * 2^57 + 1 and 27 * 2^56 + 1.
inline constexpr NttPrime kPrimeA{4179340454199820289ULL, 3};
inline constexpr NttPrime kPrimeB{1945555039024054273ULL, 5};
inline constexpr int kMaxLog2 = 56;

inline constexpr std::size_t kDirectThreshold = 4096;

inline void transform(std::vector<u64>& a, const NttPrime& prime, bool inverse) {
  const u64 mod = prime.modulus;
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    u64 w = powmod(prime.generator, (mod - 1) / len, mod);
    if (inverse) w = powmod(w, mod - 2, mod);
    const std::size_t half = len / 2;
    std::vector<u64> twiddle(half);
    twiddle[0] = 1;
    for (std::size_t k = 1; k < half; ++k) twiddle[k] = mulmod(twiddle[k - 1], w, mod);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const u64 u = a[i + k];
        const u64 v = mulmod(a[i + k + half], twiddle[k], mod);
        a[i + k] = u + v >= mod ? u + v - mod : u + v;
        a[i + k + half] = u >= v ? u - v : u + mod - v;
      }
    }
  }
  if (inverse) {
    const u64 n_inv = powmod(n % mod, mod - 2, mod);
    for (auto& x : a) x = mulmod(x, n_inv, mod);
  }
}

namespace detail {

inline std::vector<u64> linear_mod(std::span<const u64> x, std::span<const u64> y, std::size_t size,
                                   const NttPrime& prime) {
  std::vector<u64> fx(size, 0), fy(size, 0);
  for (std::size_t i = 0; i < x.size(); ++i) fx[i] = x[i] % prime.modulus;
  for (std::size_t i = 0; i < y.size(); ++i) fy[i] = y[i] % prime.modulus;
  transform(fx, prime, false);
  transform(fy, prime, false);
  for (std::size_t i = 0; i < size; ++i) fx[i] = mulmod(fx[i], fy[i], prime.modulus);
  transform(fx, prime, true);
  return fx;
}

}  // namespace detail

/// Direct cyclic convolution, out[k] = sum_{i+j == k mod m} x[i] y[j].
inline std::vector<u64> cyclic_direct(std::span<const u64> x, std::span<const u64> y) {
  const std::size_t m = x.size();
  if (y.size() != m) throw std::invalid_argument("cyclic_direct: length mismatch");
  std::vector<u128> acc(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    if (x[i] == 0) continue;
    const u128 xi = x[i];
    std::size_t k = i;
    for (std::size_t j = 0; j < m; ++j) {
      acc[k] += xi * y[j];
      if (++k == m) k = 0;
    }
  }
  std::vector<u64> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (acc[k] > UINT64_MAX) throw std::overflow_error("cyclic_direct: entry exceeds 64 bits");
    out[k] = static_cast<u64>(acc[k]);
  }
  return out;
}

/// Cyclic convolution through two NTT primes. Entries of the result must be
/// below 2^64 (checked against the CRT range, not the caller's assumptions).
inline std::vector<u64> cyclic_ntt(std::span<const u64> x, std::span<const u64> y) {
  const std::size_t m = x.size();
  if (y.size() != m) throw std::invalid_argument("cyclic_ntt: length mismatch");
  std::size_t size = 1;
  int log2 = 0;
  while (size < 2 * m - 1) {
    size <<= 1;
    ++log2;
  }
  if (log2 > kMaxLog2) throw std::length_error("cyclic_ntt: transform too long");
  const auto ra = detail::linear_mod(x, y, size, kPrimeA);
  const auto rb = detail::linear_mod(x, y, size, kPrimeB);
  const u64 pa = kPrimeA.modulus, pb = kPrimeB.modulus;
  const u64 pa_inv_mod_pb = inverse_mod(pa % pb, pb);
  std::vector<u128> folded(m, 0);
  for (std::size_t k = 0; k < 2 * m - 1; ++k) {
    // value = ra + pa * t, t = (rb - ra) * pa^{-1} mod pb
    const u64 diff = (rb[k] + pb - ra[k] % pb) % pb;
    const u64 t = mulmod(diff, pa_inv_mod_pb, pb);
    const u128 value = static_cast<u128>(ra[k]) + static_cast<u128>(pa) * t;
    folded[k % m] += value;
  }
  std::vector<u64> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (folded[k] > UINT64_MAX) throw std::overflow_error("cyclic_ntt: entry exceeds 64 bits");
    out[k] = static_cast<u64>(folded[k]);
  }
  return out;
}

inline std::vector<u64> cyclic_convolve(std::span<const u64> x, std::span<const u64> y) {
  return x.size() <= kDirectThreshold ? cyclic_direct(x, y) : cyclic_ntt(x, y);
}

}  // namespace cubes::ntt
