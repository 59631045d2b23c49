#pragma once

// Truncated singular series s_a(K) = sum_{n <= K} T_a(n)/n^3, the mollifier
// M_a(K) = sum_{n <= K, (n,30)=1} mu(n) T_a(n)/n^3, the Euler coefficients
// c_a(n), local factors gamma_p(a), and scans over windows of a.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cubes/exp_sums.hpp"

namespace cubes {

enum class NumericMode { exact, real };

struct SeriesWindow {
  u64 K = 1;
  i64 a_lo = 0;
  i64 a_hi = 0;
  NumericMode mode = NumericMode::real;
  std::vector<double> s;            // s_a(K), a = a_lo..a_hi
  std::vector<double> m;            // M_a(K)
  std::vector<Rational> s_exact;    // filled in exact mode only
  std::vector<Rational> m_exact;

  std::size_t size() const { return static_cast<std::size_t>(a_hi - a_lo + 1); }
  double s_at(i64 a) const { return s[static_cast<std::size_t>(a - a_lo)]; }
  double m_at(i64 a) const { return m[static_cast<std::size_t>(a - a_lo)]; }
};

inline constexpr std::size_t kMaxRealWindow = 100'000'000;
inline constexpr std::size_t kMaxExactWindow = 10'000;

inline bool coprime_to_30(u64 n) { return n % 2 != 0 && n % 3 != 0 && n % 5 != 0; }

namespace detail {

// Compensated (Neumaier) accumulation into sum/comp.
inline void neumaier_add(double& sum, double& comp, double x) {
  const double t = sum + x;
  if (std::fabs(sum) >= std::fabs(x))
    comp += (sum - t) + x;
  else
    comp += (x - t) + sum;
  sum = t;
}

inline void window_block_real(u64 K, i64 a_lo, std::size_t begin, std::size_t end, TTable& table,
                              std::vector<double>& s, std::vector<double>& m) {
  std::vector<double> s_comp(end - begin, 0), m_comp(end - begin, 0);
  for (u64 n = 1; n <= K; ++n) {
    const TVector& t = table.full(n);
    const double w = 1.0 / (static_cast<double>(n) * n * n);
    const int mu = coprime_to_30(n) ? moebius(n) : 0;
    u64 r = mod_floor(a_lo + static_cast<i64>(begin), n);
    for (std::size_t i = begin; i < end; ++i) {
      const i64 tv = t.values[r];
      if (tv != 0) {
        const double term = static_cast<double>(tv) * w;
        neumaier_add(s[i], s_comp[i - begin], term);
        if (mu != 0) neumaier_add(m[i], m_comp[i - begin], mu * term);
      }
      if (++r == n) r = 0;
    }
  }
  for (std::size_t i = begin; i < end; ++i) {
    s[i] += s_comp[i - begin];
    m[i] += m_comp[i - begin];
  }
}

}  // namespace detail

/// s_a(K) and M_a(K) for every a in [a_lo, a_hi]. The real mode splits the
/// window into contiguous blocks, one per thread; each entry is summed over n
/// in increasing order, so the output does not depend on the thread count.
inline SeriesWindow series_window(u64 K, i64 a_lo, i64 a_hi, NumericMode mode, TTable& table = default_table(),
                                  unsigned threads = 1) {
  if (K < 1) throw std::invalid_argument("series_window: K must be >= 1");
  if (a_hi < a_lo) throw std::invalid_argument("series_window: empty window");
  SeriesWindow w;
  w.K = K;
  w.a_lo = a_lo;
  w.a_hi = a_hi;
  w.mode = mode;
  const std::size_t len = w.size();
  if (mode == NumericMode::exact && len > kMaxExactWindow) {
    throw std::invalid_argument("series_window: exact window longer than " + std::to_string(kMaxExactWindow));
  }
  if (len > kMaxRealWindow) throw std::invalid_argument("series_window: window too long");
  // Materialize the T-vectors up front so worker threads only read.
  for (u64 n = 1; n <= K; ++n) table.full(n);
  if (mode == NumericMode::exact) {
    w.s_exact.assign(len, Rational(0));
    w.m_exact.assign(len, Rational(0));
    for (u64 n = 1; n <= K; ++n) {
      const TVector& t = table.full(n);
      const BigInt n3 = BigInt(n) * n * n;
      const int mu = coprime_to_30(n) ? moebius(n) : 0;
      u64 r = mod_floor(a_lo, n);
      for (std::size_t i = 0; i < len; ++i) {
        if (t.values[r] != 0) {
          const Rational term(BigInt(t.values[r]), n3);
          w.s_exact[i] += term;
          if (mu != 0) w.m_exact[i] += mu * term;
        }
        if (++r == n) r = 0;
      }
    }
    w.s.resize(len);
    w.m.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
      w.s[i] = to_double(w.s_exact[i]);
      w.m[i] = to_double(w.m_exact[i]);
    }
    return w;
  }
  w.s.assign(len, 0.0);
  w.m.assign(len, 0.0);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, len / 1024))));
  if (threads == 1) {
    detail::window_block_real(K, a_lo, 0, len, table, w.s, w.m);
    return w;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (len + threads - 1) / threads;
  for (unsigned k = 0; k < threads; ++k) {
    const std::size_t begin = k * chunk, end = std::min(len, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] { detail::window_block_real(K, a_lo, begin, end, table, w.s, w.m); });
  }
  for (auto& th : pool) th.join();
  return w;
}

/// s_a(K) for one a, exactly.
inline Rational s_exact(i64 a, u64 K, TTable& table = default_table()) {
  Rational s = 0;
  for (u64 n = 1; n <= K; ++n) {
    const i64 t = table.full(n).at(a);
    if (t != 0) s += Rational(BigInt(t), BigInt(n) * n * n);
  }
  return s;
}

inline Rational mollifier_exact(i64 a, u64 K, TTable& table = default_table()) {
  Rational m = 0;
  for (u64 n = 1; n <= K; ++n) {
    if (!coprime_to_30(n)) continue;
    const int mu = moebius(n);
    if (mu == 0) continue;
    const i64 t = table.full(n).at(a);
    if (t != 0) m += Rational(BigInt(mu) * t, BigInt(n) * n * n);
  }
  return m;
}

/// c_a(n) = prod_{p^l || n} p^{-3l} [T_a(p^l) - T_a(p^{l-1}) T_a(p) 1_{p >= 7}].
inline Rational c_coeff(i64 a, const Factored& n, TTable& table = default_table()) {
  if (a == 0) throw std::invalid_argument("c_coeff: a must be nonzero");
  Rational c = 1;
  for (const auto& [p, l] : n.factors) {
    BigInt local = table.prime_power(p, l).at(a);
    if (p >= 7) {
      const BigInt below = l == 1 ? BigInt(1) : BigInt(table.prime_power(p, l - 1).at(a));
      local -= below * table.prime_power(p, 1).at(a);
    }
    if (local == 0) return 0;
    c *= Rational(local, big_pow(BigInt(p), 3 * static_cast<unsigned>(l)));
  }
  return c;
}

struct GammaFactor {
  i64 a = 0;
  u64 p = 0;
  Rational value;
  Rational mollifier;
};

/// gamma_p(a) = sigma_{p,a} (1 - T_a(p)/p^3 1_{p >= 7}).
inline GammaFactor gamma_factor(i64 a, u64 p, TTable& table = default_table()) {
  if (a == 0) throw std::invalid_argument("gamma_factor: a must be nonzero");
  GammaFactor g;
  g.a = a;
  g.p = p;
  g.mollifier = 1;
  if (p >= 7) g.mollifier -= Rational(BigInt(table.prime_power(p, 1).at(a)), big_pow(BigInt(p), 3));
  if (!(g.mollifier > Rational(1, 100) && g.mollifier < Rational(199, 100))) {
    throw std::logic_error("gamma_factor: mollifier outside (0.01, 1.99) at p=" + std::to_string(p));
  }
  g.value = sigma_p_a(p, a, table).value * g.mollifier;
  if (is_admissible(a) && !(g.value > 0)) {
    throw std::logic_error("gamma_factor: nonpositive value for admissible a=" + std::to_string(a));
  }
  return g;
}

struct GammaProduct {
  i64 a = 0;
  u64 p_max = 0;
  double value = 0;         // prod_{p <= p_max} gamma_p(a)
  double half_value = 0;    // prod_{p <= p_max/2} gamma_p(a)
  double stabilization = 0; // |value - half_value|
};

inline GammaProduct gamma(i64 a, u64 p_max, TTable& table = default_table()) {
  GammaProduct g;
  g.a = a;
  g.p_max = p_max;
  double value = 1, half = 1;
  for (u64 p : primes_up_to(p_max)) {
    const double f = to_double(gamma_factor(a, p, table).value);
    value *= f;
    if (2 * p <= p_max) half *= f;
  }
  g.value = value;
  g.half_value = half;
  g.stabilization = std::fabs(value - half);
  return g;
}

struct EulerTruncationReport {
  i64 a = 0;
  u64 p_max = 0;
  u64 D = 1;
  double gamma_value = 0;
  std::vector<u64> K;
  std::vector<double> partial;     // sum_{n <= K} c_a(n)
  std::vector<double> difference;  // partial - gamma
  bool decreasing = true;          // |difference| strictly decreasing along K
};

inline EulerTruncationReport euler_truncation_check(i64 a, const std::vector<u64>& K_list, u64 p_max,
                                                    TTable& table = default_table()) {
  if (a == 0) throw std::invalid_argument("euler_truncation_check: a must be nonzero");
  EulerTruncationReport r;
  r.a = a;
  r.p_max = p_max;
  r.D = sq_cub_parts(abs_u64(a)).sq;
  r.gamma_value = gamma(a, p_max, table).value;
  const u64 k_max = K_list.empty() ? 0 : *std::max_element(K_list.begin(), K_list.end());
  std::vector<Rational> prefix(k_max + 1, Rational(0));
  for (u64 n = 1; n <= k_max; ++n) prefix[n] = prefix[n - 1] + c_coeff(a, factor(n), table);
  double last = INFINITY;
  for (u64 K : K_list) {
    const double partial = to_double(prefix[K]);
    const double diff = partial - r.gamma_value;
    r.K.push_back(K);
    r.partial.push_back(partial);
    r.difference.push_back(diff);
    if (!(std::fabs(diff) < last)) r.decreasing = false;
    last = std::fabs(diff);
  }
  return r;
}

struct IdentityCheck {
  bool ok = false;
  Rational lhs;
  Rational rhs;
  std::vector<std::string> mismatches;  // one line per n where sum_{n1 n2 = n} differs from c_a(n)
};

/// Verifies s_a(K) M_a(K) = sum_{n <= K} c_a(n) + sum_{n1, n2 <= K, n1 n2 > K, (n2,30)=1}
/// (T_a(n1)/n1^3)(mu(n2) T_a(n2)/n2^3) exactly.
inline IdentityCheck identity_check_s_times_m(i64 a, u64 K, TTable& table = default_table()) {
  if (a == 0) throw std::invalid_argument("identity_check_s_times_m: a must be nonzero");
  if (K > 64) throw std::invalid_argument("identity_check_s_times_m: K must be <= 64");
  std::vector<Rational> f(K + 1), g(K + 1);
  for (u64 n = 1; n <= K; ++n) {
    const BigInt n3 = BigInt(n) * n * n;
    f[n] = Rational(BigInt(table.full(n).at(a)), n3);
    g[n] = coprime_to_30(n) ? Rational(BigInt(moebius(n)) * table.full(n).at(a), n3) : Rational(0);
  }
  IdentityCheck out;
  Rational s = 0, m = 0;
  for (u64 n = 1; n <= K; ++n) {
    s += f[n];
    m += g[n];
  }
  out.lhs = s * m;
  Rational main = 0, cross = 0;
  for (u64 n = 1; n <= K; ++n) {
    const Rational c = c_coeff(a, factor(n), table);
    main += c;
    Rational conv = 0;
    for (u64 n1 : divisors(n)) conv += f[n1] * g[n / n1];
    if (conv != c) {
      std::ostringstream os;
      os << "n=" << n << " convolution=" << conv << " c=" << c;
      out.mismatches.push_back(os.str());
    }
  }
  for (u64 n1 = 1; n1 <= K; ++n1)
    for (u64 n2 = K / n1 + 1; n2 <= K; ++n2) cross += f[n1] * g[n2];
  out.rhs = main + cross;
  out.ok = out.lhs == out.rhs && out.mismatches.empty();
  return out;
}

struct ExceptionalScan {
  i64 A = 0;
  u64 K = 1;
  double eta = 0;
  u64 count = 0;
  double bin_width = 0.25;
  double bin_origin = 0;
  std::vector<u64> histogram;         // counts of s_a(K) in [origin + i w, origin + (i+1) w)
  std::vector<u64> trend_K;           // K/4, K/2, K (distinct, >= 1)
  std::vector<double> trend_fraction; // count(K') / (2A)
};

namespace detail {

inline u64 count_small(const SeriesWindow& w, double eta) {
  u64 count = 0;
  for (i64 a = w.a_lo; a <= w.a_hi; ++a)
    if (is_admissible(a) && std::fabs(w.s_at(a)) <= eta) ++count;
  return count;
}

}  // namespace detail

/// #{a in [-A, A] : a != +-4 mod 9, |s_a(K)| <= eta} with a histogram of s_a(K).
inline ExceptionalScan exceptional_scan(i64 A, u64 K, double eta, TTable& table = default_table(),
                                        unsigned threads = 1, double bin_width = 0.25) {
  if (A < 1 || K < 1 || !(eta > 0)) throw std::invalid_argument("exceptional_scan: need A, K >= 1 and eta > 0");
  ExceptionalScan scan;
  scan.A = A;
  scan.K = K;
  scan.eta = eta;
  scan.bin_width = bin_width;
  const auto w = series_window(K, -A, A, NumericMode::real, table, threads);
  scan.count = detail::count_small(w, eta);
  double lo = INFINITY, hi = -INFINITY;
  for (double v : w.s) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  scan.bin_origin = std::floor(lo / bin_width) * bin_width;
  scan.histogram.assign(static_cast<std::size_t>(std::floor((hi - scan.bin_origin) / bin_width)) + 1, 0);
  for (double v : w.s) ++scan.histogram[static_cast<std::size_t>(std::floor((v - scan.bin_origin) / bin_width))];
  std::vector<u64> ks;
  for (u64 k : {K / 4, K / 2, K})
    if (k >= 1 && (ks.empty() || ks.back() != k)) ks.push_back(k);
  for (u64 k : ks) {
    const u64 c = k == K ? scan.count : detail::count_small(series_window(k, -A, A, NumericMode::real, table, threads), eta);
    scan.trend_K.push_back(k);
    scan.trend_fraction.push_back(static_cast<double>(c) / (2.0 * static_cast<double>(A)));
  }
  return scan;
}

struct MomentEntry {
  u64 p = 0;
  std::vector<int> m_exp;  // exponents of m_1..m_r
  std::vector<int> n_exp;  // exponents of n_1..n_r
  u64 modulus = 1;         // m_1...m_r n_1...n_r
  bool square_full = false;
  Rational abs_mean;       // E_b |T^nat_b(m)| |T^nat_b(n)|
  Rational signed_sum;     // sum_b T^nat_b(m) T^nat_b(n)
  double shape = 0;        // prod (m3 n3)^{1/2} (m n)^{1/2} / rad
  double ratio = 0;        // abs_mean / shape
};

struct MomentReport {
  int r = 1;
  std::vector<MomentEntry> entries;
  double max_ratio = 0;               // fitted implied constant
  u64 vanishing_violations = 0;       // non-square-full moduli with nonzero signed sum
  double max_t_nat_over_n = 0;        // max |T^nat_a(n)|/n over the grid moduli
};

/// Complete T_b moments over prime-power tuples. The implied constant of the
/// bound is reported as the maximal ratio, never asserted.
inline MomentReport moment_report(const std::vector<u64>& p_list, int l_cap, int r, u64 modulus_cap = 100'000,
                                  TTable& table = default_table()) {
  if (r < 1) throw std::invalid_argument("moment_report: r must be >= 1");
  MomentReport rep;
  rep.r = r;
  for (u64 p : p_list) {
    if (!is_prime(p)) throw std::invalid_argument("moment_report: " + std::to_string(p) + " is not prime");
    std::vector<int> exps(2 * r, 0);
    while (true) {
      int total = 0;
      for (int e : exps) total += e;
      u128 modulus = 1;
      for (int i = 0; i < total && modulus <= modulus_cap; ++i) modulus *= p;
      if (modulus <= modulus_cap) {
        const u64 M = static_cast<u64>(modulus);
        MomentEntry e;
        e.p = p;
        e.m_exp.assign(exps.begin(), exps.begin() + r);
        e.n_exp.assign(exps.begin() + r, exps.end());
        e.modulus = M;
        e.square_full = total != 1;
        BigInt abs_sum = 0, signed_sum = 0;
        for (u64 b = 0; b < M; ++b) {
          BigInt prod = 1;
          for (int x : exps) {
            if (x > 0) prod *= table.prime_power(p, x).at(static_cast<i64>(b));
            if (prod == 0) break;
          }
          signed_sum += prod;
          abs_sum += boost::multiprecision::abs(prod);
        }
        // T^nat = T / n^2, so the product carries modulus^{-2}.
        const BigInt m2 = BigInt(M) * M;
        e.abs_mean = Rational(abs_sum, m2 * M);
        e.signed_sum = Rational(signed_sum, m2);
        double shape = 1;
        for (int x : exps) {
          const double pk = std::pow(static_cast<double>(p), x);
          shape *= (x >= 3 ? std::sqrt(pk) : 1.0) * std::sqrt(pk);
        }
        e.shape = shape / (total > 0 ? static_cast<double>(p) : 1.0);
        e.ratio = to_double(e.abs_mean) / e.shape;
        if (!e.square_full && e.signed_sum != 0) ++rep.vanishing_violations;
        rep.max_ratio = std::max(rep.max_ratio, e.ratio);
        rep.entries.push_back(std::move(e));
      }
      std::size_t i = 0;
      while (i < exps.size() && exps[i] == l_cap) exps[i++] = 0;
      if (i == exps.size()) break;
      ++exps[i];
    }
    for (int l = 1; l <= l_cap; ++l) {
      const u64 n = ipow(p, l);
      if (n > modulus_cap) break;
      for (i64 v : table.prime_power(p, l).values) {
        rep.max_t_nat_over_n = std::max(rep.max_t_nat_over_n, std::fabs(static_cast<double>(v)) / (double(n) * n * n));
      }
    }
  }
  return rep;
}

}  // namespace cubes
