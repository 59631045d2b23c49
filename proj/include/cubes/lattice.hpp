#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "cubes/arith.hpp"
#include "cubes/rational.hpp"
#include "cubes/weights.hpp"

namespace cubes {

// Lattice weights are stored as integers in units of 2^-kScaleBits, so every
// count, pair sum and special sum below is exact integer arithmetic.
inline constexpr int kScaleBits = 40;

inline i64 quantize(double v) { return std::llround(std::ldexp(v, kScaleBits)); }
inline double dequantize(i64 q) { return std::ldexp(double(q), -kScaleBits); }
inline double dequantize2(const BigInt& q) { return std::ldexp(to_double(q), -2 * kScaleBits); }

inline constexpr u64 kEnumerationLimit = 100000;

struct LatticePoint {
  IVec3 y;
  i64 f;  // F0(y)
  i64 q;  // quantized nu(y/X)
};

struct CountTable {
  u64 X = 0;
  std::string weight;
  double R = 0;
  i64 a_lim = 0;          // entries cover |a| <= a_lim
  std::vector<i64> q;     // q[a + a_lim] = N_{a,nu}(X) in units 2^-40
  u64 points = 0;         // lattice points with nonzero quantized weight
  BigInt total_mass = 0;  // sum of q over points, accumulated during enumeration
  std::vector<LatticePoint> kept;

  i64 raw(i64 a) const {
    if (a < -a_lim || a > a_lim) return 0;
    return q[static_cast<std::size_t>(a + a_lim)];
  }
  double N(i64 a) const { return dequantize(raw(a)); }

  void write_csv(std::ostream& os) const {
    os << "a,N\n";
    os.precision(17);
    for (i64 a = -a_lim; a <= a_lim; ++a)
      if (raw(a) != 0) os << a << ',' << N(a) << '\n';
  }
};

namespace detail {

// Smallest integer t with t^3 >= v, and largest with t^3 <= v.
inline i64 icbrt_ceil(i64 v) {
  i64 t = static_cast<i64>(std::llround(std::cbrt(double(v))));
  while (static_cast<i128>(t) * t * t < v) ++t;
  while (static_cast<i128>(t - 1) * (t - 1) * (t - 1) >= v) --t;
  return t;
}

inline i64 icbrt_floor(i64 v) {
  i64 t = static_cast<i64>(std::llround(std::cbrt(double(v))));
  while (static_cast<i128>(t) * t * t > v) --t;
  while (static_cast<i128>(t + 1) * (t + 1) * (t + 1) <= v) ++t;
  return t;
}

struct Box {
  i64 lo, hi, a_lim;
};

inline Box enumeration_box(u64 X, const Weight& w) {
  if (w.B * X > kEnumerationLimit)
    throw std::invalid_argument("enumeration bound exceeded: B*X = " + std::to_string(w.B * X) + " > " +
                                std::to_string(kEnumerationLimit));
  const double Xd = double(X);
  Box b;
  b.lo = std::max<i64>(1, static_cast<i64>(std::ceil(w.coord_floor * Xd)));
  b.hi = static_cast<i64>(std::floor(w.coord_ceiling * Xd));
  b.a_lim = static_cast<i64>(std::floor(w.a_tilde_max * Xd * Xd * Xd));
  return b;
}

// Calls visit(y) for every integer y with lo <= |y_l| <= hi and |F0(y)| <= a_lim,
// for y2 restricted to the signed values in [y2_begin, y2_end).
template <class Visit>
void for_each_box_point(const Box& b, i64 y2_begin, i64 y2_end, Visit&& visit) {
  for (i64 y2 = y2_begin; y2 < y2_end; ++y2) {
    if (std::llabs(y2) < b.lo || std::llabs(y2) > b.hi) continue;
    for (i64 y3 = -b.hi; y3 <= b.hi; ++y3) {
      if (std::llabs(y3) < b.lo) continue;
      const i64 c = y2 * y2 * y2 + y3 * y3 * y3;
      const i64 y1_lo = icbrt_ceil(-b.a_lim - c), y1_hi = icbrt_floor(b.a_lim - c);
      for (i64 y1 = std::max(y1_lo, -b.hi); y1 <= std::min(y1_hi, b.hi); ++y1) {
        if (std::llabs(y1) < b.lo) continue;
        visit(IVec3{y1, y2, y3}, y1 * y1 * y1 + c);
      }
    }
  }
}

}  // namespace detail

// N_{a,nu}(X) = sum over integer y with F0(y) = a of nu(y/X), for all a at once.
inline CountTable count_weighted(u64 X, const Weight& w, unsigned threads = 1, bool keep_points = false) {
  if (X < 1) throw std::invalid_argument("count_weighted: X must be >= 1");
  const auto box = detail::enumeration_box(X, w);
  CountTable t;
  t.X = X;
  t.weight = w.name;
  t.R = w.R;
  t.a_lim = box.a_lim;
  t.q.assign(static_cast<std::size_t>(2 * box.a_lim + 1), 0);
  if (box.a_lim < 0 || box.lo > box.hi) {
    t.a_lim = 0;
    t.q.assign(1, 0);
    return t;
  }
  const double Xd = double(X);
  threads = std::max(1u, threads);
  struct Part {
    std::vector<i64> q;
    std::vector<LatticePoint> kept;
    u64 points = 0;
    BigInt mass = 0;
  };
  std::vector<Part> parts(threads);
  const i64 span = 2 * box.hi + 1;
  auto work = [&](unsigned k) {
    Part& part = parts[k];
    part.q.assign(t.q.size(), 0);
    const i64 b = -box.hi + span * k / threads, e = -box.hi + span * (k + 1) / threads;
    i128 mass = 0;
    detail::for_each_box_point(box, b, e, [&](const IVec3& y, i64 f) {
      if (w.in_support && !w.in_support({double(y[0]) / Xd, double(y[1]) / Xd, double(y[2]) / Xd})) return;
      const i64 q = quantize(w.at_lattice(y, Xd));
      if (q == 0) return;
      part.q[static_cast<std::size_t>(f + box.a_lim)] += q;
      mass += q;
      ++part.points;
      if (keep_points) part.kept.push_back({y, f, q});
    });
    part.mass = to_big(mass);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(work, k);
    for (auto& th : pool) th.join();
  }
  for (auto& part : parts) {
    for (std::size_t i = 0; i < t.q.size(); ++i) t.q[i] += part.q[i];
    t.points += part.points;
    t.total_mass += part.mass;
    if (keep_points) t.kept.insert(t.kept.end(), part.kept.begin(), part.kept.end());
  }
  return t;
}

// N_{a,nu}(X) for one a by a different loop order (y1 outside, y3 solved).
inline i64 count_at(i64 a, u64 X, const Weight& w, u64* points = nullptr) {
  const auto box = detail::enumeration_box(X, w);
  const double Xd = double(X);
  i64 total = 0;
  u64 n = 0;
  for (i64 y1 = box.hi; y1 >= -box.hi; --y1) {
    if (std::llabs(y1) < box.lo) continue;
    for (i64 y2 = box.hi; y2 >= -box.hi; --y2) {
      if (std::llabs(y2) < box.lo) continue;
      const i64 rest = a - y1 * y1 * y1 - y2 * y2 * y2;
      const i64 y3 = detail::icbrt_floor(rest);
      if (y3 * y3 * y3 != rest || std::llabs(y3) < box.lo || std::llabs(y3) > box.hi) continue;
      const IVec3 y{y1, y2, y3};
      if (w.in_support && !w.in_support({double(y1) / Xd, double(y2) / Xd, double(y3) / Xd})) continue;
      const i64 q = quantize(w.at_lattice(y, Xd));
      if (q == 0) continue;
      total += q;
      ++n;
    }
  }
  if (points) *points = n;
  return total;
}

// N_{nu(x)2}(X; d) = sum over a in dZ of N_{a,nu}(X)^2, in units 2^-80.
inline BigInt pair_count(const CountTable& t, u64 d) {
  if (d < 1) throw std::invalid_argument("pair_count: d must be >= 1");
  BigInt s = 0;
  const i64 start = -(t.a_lim / static_cast<i64>(d)) * static_cast<i64>(d);
  for (i64 a = start; a <= t.a_lim; a += static_cast<i64>(d)) {
    const i64 v = t.raw(a);
    if (v != 0) s += BigInt(v) * v;
  }
  return s;
}

// The same quantity as a literal sum over pairs (y, z) with F0(y) = F0(z), d | F0(y).
inline BigInt pair_count_bruteforce(const CountTable& t, u64 d) {
  if (t.kept.empty() && t.points > 0) throw std::invalid_argument("pair_count_bruteforce needs kept points");
  std::vector<const LatticePoint*> pts;
  pts.reserve(t.kept.size());
  for (const auto& p : t.kept)
    if (p.f % static_cast<i64>(d) == 0) pts.push_back(&p);
  std::sort(pts.begin(), pts.end(), [](const LatticePoint* x, const LatticePoint* y) { return x->f < y->f; });
  BigInt s = 0;
  std::size_t i = 0;
  while (i < pts.size()) {
    std::size_t j = i;
    while (j < pts.size() && pts[j]->f == pts[i]->f) ++j;
    i128 group = 0;
    for (std::size_t u = i; u < j; ++u)
      for (std::size_t v = i; v < j; ++v) group += static_cast<i128>(pts[u]->q) * pts[v]->q;
    s += to_big(group);
    i = j;
  }
  return s;
}

struct SpecialCount {
  u64 X = 0, d = 1;
  BigInt diag = 0;        // sum_y sum_{sigma in S3} nu(y) nu(sigma y), literal lookups
  BigInt formula = 0;     // 3! sum_y nu(y)^2
  BigInt distinct = 0;    // pairs (y, z) with z in the permutation orbit of y, each once
  BigInt correction = 0;  // formula - distinct = sum_y (6 - |orbit y|) nu(y)^2
  u64 repeated = 0;       // contributing y with a repeated coordinate
};

inline SpecialCount special_count(const CountTable& t, u64 d, const Weight& w) {
  if (!w.symmetric || !w.very_clean)
    throw std::invalid_argument("special_count needs a symmetric very clean weight");
  if (t.kept.empty() && t.points > 0) throw std::invalid_argument("special_count needs kept points");
  struct Hash {
    std::size_t operator()(const IVec3& y) const {
      u64 h = 1469598103934665603ULL;
      for (i64 v : y) h = (h ^ static_cast<u64>(v)) * 1099511628211ULL;
      return static_cast<std::size_t>(h);
    }
  };
  std::unordered_map<IVec3, i64, Hash> lookup;
  lookup.reserve(t.kept.size() * 2);
  for (const auto& p : t.kept) lookup.emplace(p.y, p.q);
  SpecialCount s;
  s.X = t.X;
  s.d = d;
  static constexpr std::array<std::array<int, 3>, 6> kPerms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (const auto& p : t.kept) {
    if (p.f % static_cast<i64>(d) != 0) continue;
    i128 diag = 0, distinct = 0;
    std::vector<IVec3> orbit;
    for (const auto& perm : kPerms) {
      const IVec3 z{p.y[perm[0]], p.y[perm[1]], p.y[perm[2]]};
      const auto it = lookup.find(z);
      const i64 qz = it == lookup.end() ? 0 : it->second;
      diag += static_cast<i128>(p.q) * qz;
      if (std::find(orbit.begin(), orbit.end(), z) == orbit.end()) {
        orbit.push_back(z);
        distinct += static_cast<i128>(p.q) * qz;
      }
    }
    const i128 sq = static_cast<i128>(p.q) * p.q;
    s.diag += to_big(diag);
    s.distinct += to_big(distinct);
    s.formula += to_big(6 * sq);
    if (orbit.size() < 6) ++s.repeated;
  }
  s.correction = s.formula - s.distinct;
  return s;
}

// r3(a) = #{(x, y, z) in Z_{>=0}^3 : x^3 + y^3 + z^3 = a}, ordered triples.
inline u64 r3_nonneg(u64 a) {
  std::unordered_map<u64, u64> two;
  for (u64 x = 0; x * x * x <= a; ++x)
    for (u64 y = 0; x * x * x + y * y * y <= a; ++y) ++two[x * x * x + y * y * y];
  u64 r = 0;
  for (u64 z = 0; z * z * z <= a; ++z) {
    const auto it = two.find(a - z * z * z);
    if (it != two.end()) r += it->second;
  }
  return r;
}

// r3(a) for all 0 <= a <= A.
inline std::vector<u64> r3_table(u64 A) {
  std::vector<u64> two(A + 1, 0), r(A + 1, 0);
  for (u64 x = 0; x * x * x <= A; ++x)
    for (u64 y = 0; x * x * x + y * y * y <= A; ++y) ++two[x * x * x + y * y * y];
  for (u64 z = 0; z * z * z <= A; ++z) {
    const u64 c = z * z * z;
    for (u64 a = c; a <= A; ++a) r[a] += two[a - c];
  }
  return r;
}

struct PrimeDemo {
  u64 A = 0;
  u64 primes = 0;
  u64 sum_r3 = 0;
  u64 sum_r3_sq = 0;
  u64 represented_admissible = 0;  // p not = +-4 mod 9 with r3(p) > 0
  u64 admissible = 0;
  double fitted_constant = 0;      // sum_r3 * log A / A
};

inline PrimeDemo prime_demo(u64 A, const std::vector<u64>* table = nullptr) {
  if (A > 1000000) throw std::invalid_argument("prime_demo: A must be <= 10^6");
  std::vector<u64> local;
  if (!table || table->size() < A + 1) {
    local = r3_table(A);
    table = &local;
  }
  PrimeDemo d;
  d.A = A;
  for (u64 p : primes_up_to(A)) {
    const u64 r = (*table)[p];
    ++d.primes;
    d.sum_r3 += r;
    d.sum_r3_sq += r * r;
    if (p % 9 != 4 && p % 9 != 5) {
      ++d.admissible;
      if (r > 0) ++d.represented_admissible;
    }
  }
  d.fitted_constant = A > 1 ? double(d.sum_r3) * std::log(double(A)) / double(A) : 0.0;
  return d;
}

}  // namespace cubes
