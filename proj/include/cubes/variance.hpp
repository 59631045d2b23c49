#pragma once

// K-approximate variance over a in dZ, its three-sum decomposition, the
// Hardy-Littlewood error functional for nu (x) nu, the truncated local moment
// identities, a prime-restricted variance and the Chebyshev pipeline.

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cubes/archimedean.hpp"
#include "cubes/lattice.hpp"
#include "cubes/singular_series.hpp"

namespace cubes {

struct HypothesisParams {
  int xi = 1;
  double delta = 0.5;
  int k = 1;
  double hbar = 0.2;

  void validate() const {
    if (xi != 0 && xi != 1) throw std::invalid_argument("hypothesis: xi must be 0 or 1");
    if (!(delta > 0)) throw std::invalid_argument("hypothesis: delta must be positive");
    if (k < 0) throw std::invalid_argument("hypothesis: k must be >= 0");
    if (!(hbar > 0) || hbar > 9 * delta / 20) throw std::invalid_argument("hypothesis: need 0 < hbar <= 9 delta / 20");
  }
};

// Long double Neumaier sum.
class Accumulator {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0, comp_ = 0;
};

// Everything that depends on (X, nu) only.
struct VarianceContext {
  u64 X = 0;
  Weight weight;
  CountTable counts;
  DensityTable density;
  double pure = 0;          // int sigma_{inf,a~}(1)^2 da~
  double count_seconds = 0;
  double density_seconds = 0;
};

inline VarianceContext make_variance_context(u64 X, const Weight& w, unsigned threads = 1, std::size_t grid = 256) {
  using clock = std::chrono::steady_clock;
  VarianceContext ctx;
  ctx.X = X;
  ctx.weight = w;
  auto t0 = clock::now();
  ctx.counts = count_weighted(X, w, threads, true);
  auto t1 = clock::now();
  ctx.density = density_table(w, grid);
  ctx.pure = pure_l2_moment(w);
  auto t2 = clock::now();
  ctx.count_seconds = std::chrono::duration<double>(t1 - t0).count();
  ctx.density_seconds = std::chrono::duration<double>(t2 - t1).count();
  return ctx;
}

inline i64 scan_limit(const VarianceContext& ctx) {
  const double X3 = double(ctx.X) * double(ctx.X) * double(ctx.X);
  return std::max<i64>(ctx.counts.a_lim, static_cast<i64>(std::ceil(ctx.density.a_max() * X3)));
}

struct VarianceTraceRow {
  i64 a;
  double N, s, sigma, diff;
};

struct VarianceReport {
  u64 X = 0, K = 1, d = 1;
  double R = 0;
  std::string weight;
  i64 a_limit = 0;
  u64 terms = 0;
  bool in_range = true;  // K d <= X^{9/10}
  double var_direct = 0;
  double sigma1 = 0, sigma2 = 0, sigma3 = 0;
  BigInt sigma1_exact = 0;  // pair count, units 2^-80
  double decomposition_residual = 0;  // |var - (s1 - 2 s2 + s3)| / var
  double series = 0;                  // singular series at level d
  double pure = 0;
  double main_term = 0;
  double special_term = 0;
  double residual = 0;                // sigma1 - main_term - special_term
  std::vector<VarianceTraceRow> trace;
};

inline double singular_series_value(u64 d, u64 n_max, TTable& table) {
  return singular_series_level_d(d, std::max(n_max, d), 0, table).euler_product;
}

inline constexpr u64 kSeriesLevel = 240;

inline VarianceReport variance(const VarianceContext& ctx, u64 K, u64 d, TTable& table = default_table(),
                               unsigned threads = 1, bool keep_trace = false, u64 series_level = kSeriesLevel) {
  if (K == 0 || d == 0) throw std::invalid_argument("variance: K and d must be positive");
  VarianceReport r;
  r.X = ctx.X;
  r.K = K;
  r.d = d;
  r.R = ctx.weight.R;
  r.weight = ctx.weight.name;
  r.in_range = double(K) * double(d) <= std::pow(double(ctx.X), 0.9);
  const i64 A = scan_limit(ctx);
  r.a_limit = A;
  const auto window = series_window(K, -A, A, NumericMode::real, table, threads);
  const i64 start = -(A / i64(d)) * i64(d);
  Accumulator var, s2, s3;
  for (i64 a = start; a <= A; a += i64(d)) {
    const long double N = ctx.counts.N(a), s = window.s_at(a), sig = ctx.density.at(double(a), double(ctx.X));
    const long double pred = s * sig, diff = N - pred;
    var.add(diff * diff);
    if (N != 0) s2.add(N * pred);
    s3.add(pred * pred);
    ++r.terms;
    if (keep_trace && (N != 0 || pred != 0))
      r.trace.push_back({a, double(N), double(s), double(sig), double(diff)});
  }
  r.sigma1_exact = pair_count(ctx.counts, d);
  r.sigma1 = dequantize2(r.sigma1_exact);
  r.sigma2 = double(s2.value());
  r.sigma3 = double(s3.value());
  r.var_direct = double(var.value());
  const long double recomposed = (long double)r.sigma1 - 2 * s2.value() + s3.value();
  r.decomposition_residual =
      r.var_direct > 0 ? double(std::fabs(var.value() - recomposed) / var.value()) : double(std::fabs(recomposed));
  r.series = singular_series_value(d, series_level, table);
  r.pure = ctx.pure;
  const double X3 = double(ctx.X) * double(ctx.X) * double(ctx.X);
  r.main_term = r.series * r.pure * X3;
  r.special_term = dequantize2(special_count(ctx.counts, d, ctx.weight).distinct);
  r.residual = r.sigma1 - r.main_term - r.special_term;
  return r;
}

struct HLError {
  u64 X = 0, d = 1;
  double pair = 0;
  double series = 0;
  double main_term = 0;
  double special_diag = 0;
  double special_distinct = 0;
  double E = 0;           // pair - main - special (distinct pairs)
  double E_diag = 0;      // same with the literal permutation sum
  double E_over_X3 = 0;
};

inline HLError hl_error(const VarianceContext& ctx, u64 d, TTable& table = default_table(),
                        u64 series_level = kSeriesLevel) {
  HLError e;
  e.X = ctx.X;
  e.d = d;
  e.pair = dequantize2(pair_count(ctx.counts, d));
  e.series = singular_series_value(d, series_level, table);
  const double X3 = double(ctx.X) * double(ctx.X) * double(ctx.X);
  e.main_term = e.series * ctx.pure * X3;
  const auto sp = special_count(ctx.counts, d, ctx.weight);
  e.special_diag = dequantize2(sp.diag);
  e.special_distinct = dequantize2(sp.distinct);
  e.E = e.pair - e.main_term - e.special_distinct;
  e.E_diag = e.pair - e.main_term - e.special_diag;
  e.E_over_X3 = e.E / X3;
  return e;
}

inline std::vector<HLError> hl_error_trend(const Weight& w, const std::vector<u64>& Xs, u64 d,
                                           TTable& table = default_table(), unsigned threads = 1) {
  std::vector<HLError> out;
  for (u64 X : Xs) out.push_back(hl_error(make_variance_context(X, w, threads), d, table));
  return out;
}

// ---------------------------------------------------------------------------
// Truncated local moments, exact.

struct MomentCheck {
  u64 K = 1, d = 1;
  Rational pure_lhs, mixed_lhs;          // literal sums
  Rational pure_grouped, mixed_grouped;  // regrouped by m = lcm(n, d)
  Rational main;                         // sum_{m <= K, d | m} S+_0(m;d)/m^6
  Rational truncated;                    // sum_{m <= K d, d | m} S+_0(m;d)/m^6
  Rational pure_bound, mixed_bound;      // sum over K < m <= K d of the per-m bounds
  u64 unbalanced_pairs = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

namespace detail {

inline u64 lcm_u(u64 a, u64 b) { return a / std::gcd(a, b) * b; }

// sum_{k < count} T_{dk}(n1) T_{dk}(n2)
inline i128 t_pair_sum(const TVector& t1, const TVector& t2, u64 d, u64 count) {
  const u64 n1 = t1.modulus, n2 = t2.modulus;
  const u64 s1 = d % n1, s2 = d % n2;
  u64 b1 = 0, b2 = 0;
  i128 acc = 0;
  for (u64 k = 0; k < count; ++k) {
    acc += i128(t1.values[b1]) * t2.values[b2];
    b1 += s1;
    if (b1 >= n1) b1 -= n1;
    b2 += s2;
    if (b2 >= n2) b2 -= n2;
  }
  return acc;
}

// sum_{v mod M, d | v} N_v(M) T_v(n)
inline i128 count_t_sum(const std::vector<u64>& counts, const TVector& t, u64 d) {
  const u64 M = counts.size();
  i128 acc = 0;
  for (u64 v = 0; v < M; v += d) acc += i128(counts[v]) * t.values[v % t.modulus];
  return acc;
}

inline BigInt cube(u64 n) { return BigInt(n) * n * n; }

inline Rational pure_term(const TVector& t1, const TVector& t2, u64 d, u64 M) {
  const u64 n1 = t1.modulus, n2 = t2.modulus;
  const BigInt den = BigInt(M) * cube(n1 * n2);
  return Rational(to_big(t_pair_sum(t1, t2, d, M / d)), den);
}

inline Rational mixed_term(const std::vector<u64>& counts, const TVector& t, u64 d) {
  const u64 M = counts.size();
  return Rational(to_big(count_t_sum(counts, t, d)), cube(M) * cube(t.modulus));
}

}  // namespace detail

inline MomentCheck nonarch_moment_check(u64 K, u64 d, TTable& table = default_table()) {
  if (K == 0 || d == 0) throw std::invalid_argument("moments: K and d must be positive");
  if (K > 48 || d > 8) throw std::invalid_argument("moments: exact mode needs K <= 48 and d <= 8");
  using detail::lcm_u;
  MomentCheck c;
  c.K = K;
  c.d = d;
  const u64 Kd = K * d;
  auto fail = [&](std::string msg) { c.failures.push_back(std::move(msg)); };

  // Literal sums, each at its own modulus.
  for (u64 n1 = 1; n1 <= K; ++n1) {
    const TVector& t1 = table.full(n1);
    for (u64 n2 = 1; n2 <= K; ++n2) {
      const TVector& t2 = table.full(n2);
      const Rational v = detail::pure_term(t1, t2, d, n1 * n2 * d);
      c.pure_lhs += v;
      const u64 m1 = lcm_u(n1, d), m2 = lcm_u(n2, d);
      if (m1 != m2) {
        ++c.unbalanced_pairs;
        if (v != 0) fail("unbalanced pair (" + std::to_string(n1) + "," + std::to_string(n2) + ") does not vanish");
      } else if (v != detail::pure_term(t1, t2, d, m1)) {
        fail("pure pair (" + std::to_string(n1) + "," + std::to_string(n2) + ") differs at modulus lcm");
      }
    }
    const Rational v = detail::mixed_term(table.point_counts(n1 * d), t1, d);
    c.mixed_lhs += v;
    const u64 m = lcm_u(n1, d);
    if (v != detail::mixed_term(table.point_counts(m), t1, d))
      fail("mixed term n=" + std::to_string(n1) + " differs at modulus lcm");
  }

  std::map<u64, BigInt> s_one;
  auto splus1 = [&](u64 n) -> const BigInt& {
    auto it = s_one.find(n);
    if (it == s_one.end()) it = s_one.emplace(n, s_plus_zero(n, 1, table)).first;
    return it->second;
  };

  // Regrouped sums: every n with lcm(n, d) = m divides m, so each group is finite.
  for (u64 m = d; m <= Kd; m += d) {
    std::vector<u64> ns;
    for (u64 n = 1; n <= m; ++n)
      if (m % n == 0 && lcm_u(n, d) == m) ns.push_back(n);
    const Rational target(s_plus_zero(m, d, table), detail::cube(m) * detail::cube(m));
    Rational bound = 0;
    for (u64 n = 1; n <= m; ++n)
      if (m % n == 0 && d % (m / n) == 0) bound += Rational(abs(splus1(n)), detail::cube(n) * detail::cube(n));
    bound *= num_divisors(m);

    Rational pure_full = 0, pure_trunc = 0, pure_abs = 0;
    for (u64 n1 : ns)
      for (u64 n2 : ns) {
        const Rational v = detail::pure_term(table.full(n1), table.full(n2), d, m);
        pure_full += v;
        pure_abs += abs(v);
        if (n1 <= K && n2 <= K) pure_trunc += v;
      }
    const auto& counts = table.point_counts(m);
    Rational mixed_full = 0, mixed_trunc = 0, mixed_abs = 0;
    for (u64 n : ns) {
      const Rational v = detail::mixed_term(counts, table.full(n), d);
      mixed_full += v;
      mixed_abs += abs(v);
      if (n <= K) mixed_trunc += v;
    }
    c.pure_grouped += pure_trunc;
    c.mixed_grouped += mixed_trunc;
    c.truncated += target;
    if (pure_full != target) fail("pure group m=" + std::to_string(m) + " != S+_0(m;d)/m^6");
    if (mixed_full != target) fail("mixed group m=" + std::to_string(m) + " != S+_0(m;d)/m^6");
    if (pure_abs > bound) fail("pure group m=" + std::to_string(m) + " exceeds its bound");
    if (mixed_abs > Rational(d) * bound) fail("mixed group m=" + std::to_string(m) + " exceeds its bound");
    if (m <= K) {
      c.main += target;
    } else {
      c.pure_bound += bound;
      c.mixed_bound += Rational(d) * bound;
    }
  }

  if (c.pure_lhs != c.pure_grouped) fail("pure literal sum != regrouped sum");
  if (c.mixed_lhs != c.mixed_grouped) fail("mixed literal sum != regrouped sum");
  if (abs(c.pure_lhs - c.main) > c.pure_bound) fail("pure |LHS - main| exceeds the tail bound");
  if (abs(c.mixed_lhs - c.main) > c.mixed_bound) fail("mixed |LHS - main| exceeds the tail bound");
  return c;
}

// ---------------------------------------------------------------------------
// Prime-restricted variance.

struct SievedReport {
  u64 X = 0, K = 1;
  double hbar = 0;
  double z = 0;                  // X^hbar
  std::vector<u64> primes;       // p < z
  BigInt P = 1;
  u64 terms = 0, kept = 0;
  double filtered = 0;           // sum over gcd(a, P) = 1
  double unfiltered = 0;
  double l2_norm_sq = 0;         // lattice Riemann sum X^-3 sum_y nu(y/X)^2
  double comparison = 0;         // X^3 |nu|^2 / log X
  Rational H = 0;
  double H_over_log = 0;
};

inline Rational sieve_mass(double z, TTable& table = default_table()) {
  Rational H = 0;
  for (u64 n = 1; double(n) < z; ++n) {
    if (moebius(n) == 0) continue;
    Rational term = 1;
    for (const auto& [p, e] : factor(n).factors) {
      const Rational g = g_density(p, table);
      term *= g / (Rational(1) - g);
    }
    H += term;
  }
  return H;
}

inline SievedReport sieved_variance(const VarianceContext& ctx, u64 K, const HypothesisParams& hp,
                                    TTable& table = default_table(), unsigned threads = 1) {
  hp.validate();
  if (hp.xi != 1) throw std::invalid_argument("sieved: only the xi = 1 path is implemented");
  SievedReport r;
  r.X = ctx.X;
  r.K = K;
  r.hbar = hp.hbar;
  r.z = std::pow(double(ctx.X), hp.hbar);
  if (r.z > 20) throw std::invalid_argument("sieved: need X^hbar <= 20, got " + std::to_string(r.z));
  u64 P = 1;
  for (u64 p : primes_up_to(19))
    if (double(p) < r.z) {
      r.primes.push_back(p);
      P *= p;
    }
  r.P = P;
  const i64 A = scan_limit(ctx);
  const auto window = series_window(K, -A, A, NumericMode::real, table, threads);
  Accumulator all, kept;
  for (i64 a = -A; a <= A; ++a) {
    const long double N = ctx.counts.N(a), pred = (long double)window.s_at(a) * ctx.density.at(double(a), double(ctx.X));
    const long double sq = (N - pred) * (N - pred);
    all.add(sq);
    ++r.terms;
    if (std::gcd(u64(a < 0 ? -a : a), P) == 1) {
      kept.add(sq);
      ++r.kept;
    }
  }
  r.filtered = double(kept.value());
  r.unfiltered = double(all.value());
  BigInt mass2 = 0;
  for (const auto& p : ctx.counts.kept) mass2 += BigInt(p.q) * p.q;
  const double X3 = double(ctx.X) * double(ctx.X) * double(ctx.X);
  r.l2_norm_sq = dequantize2(mass2) / X3;
  r.comparison = X3 * r.l2_norm_sq / std::log(double(ctx.X));
  r.H = sieve_mass(r.z, table);
  r.H_over_log = r.z > 1 ? to_double(r.H) / std::log(r.z) : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Chebyshev pipeline.

struct PipelineRow {
  u64 X = 0;
  double R = 0;
  int j = 1;
  u64 A = 0, K = 1;
  double eta = 0;
  double sigma_min = 0;               // min sigma_{inf,a,nu}(X) over |a| <= A
  double var = 0;                     // Var(X, K; 1)
  double var_ratio = 0;               // Var / (X^3 sigma_min^2)
  u64 admissible = 0;                 // a in [-A, A], a != +-4 mod 9
  u64 unrepresented = 0;              // admissible with N_{a,nu}(X) = 0
  u64 exceptional = 0;                // unrepresented with |s_a(K)| > eta
  double unrepresented_fraction = 0;  // unrepresented / A
  double exceptional_fraction = 0;    // exceptional / A
  double chebyshev_bound = 0;         // Var / (eta sigma_min)^2
  bool chebyshev_holds = false;
};

inline PipelineRow pipeline_row(const VarianceContext& ctx, int j, TTable& table = default_table(), unsigned threads = 1) {
  if (j < 1) throw std::invalid_argument("pipeline: j must be >= 1");
  PipelineRow row;
  row.X = ctx.X;
  row.R = ctx.weight.R;
  row.j = j;
  row.A = ctx.X * ctx.X * ctx.X;
  row.K = std::max<u64>(1, static_cast<u64>(std::floor(std::pow(double(row.A), 1.0 / (6.0 * j)) + 1e-9)));
  row.eta = std::pow(std::log(row.R), -10.0 / j);
  const auto rep = variance(ctx, row.K, 1, table, threads);
  row.var = rep.var_direct;
  const i64 A = i64(row.A);
  const auto window = series_window(row.K, -A, A, NumericMode::real, table, threads);
  row.sigma_min = std::numeric_limits<double>::infinity();
  for (i64 a = -A; a <= A; ++a) {
    row.sigma_min = std::min(row.sigma_min, ctx.density.at(double(a), double(ctx.X)));
    if (!is_admissible(a)) continue;
    ++row.admissible;
    if (ctx.counts.raw(a) != 0) continue;
    ++row.unrepresented;
    if (std::fabs(window.s_at(a)) > row.eta) ++row.exceptional;
  }
  const double X3 = double(row.A);
  row.var_ratio = row.var / (X3 * row.sigma_min * row.sigma_min);
  row.unrepresented_fraction = double(row.unrepresented) / X3;
  row.exceptional_fraction = double(row.exceptional) / X3;
  const double unit = row.eta * row.sigma_min;
  row.chebyshev_bound = row.var / (unit * unit);
  row.chebyshev_holds = double(row.exceptional) * unit * unit <= row.var;
  return row;
}

inline std::vector<PipelineRow> pipeline_demo(const std::vector<double>& R_list, const std::vector<u64>& X_list, int j,
                                              TTable& table = default_table(), unsigned threads = 1) {
  std::vector<PipelineRow> rows;
  for (u64 X : X_list) {
    if (X > 100) throw std::invalid_argument("pipeline: X must be <= 100");
    for (double R : R_list) {
      if (R < 2 || R > 8) throw std::invalid_argument("pipeline: R must lie in [2, 8]");
      rows.push_back(pipeline_row(make_variance_context(X, make_nu_star(R), threads), j, table, threads));
    }
  }
  return rows;
}

// Local solubility at every level d: the singular series never vanishes.
inline bool series_positive_up_to(u64 d_max, TTable& table = default_table()) {
  for (u64 d = 1; d <= d_max; ++d)
    if (!(g_density(d, table) > 0) || !(singular_series_level_d(d, std::max<u64>(d, 60), 0, table).euler_product > 0))
      return false;
  return true;
}

}  // namespace cubes
