#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubes/weights.hpp"

namespace cubes {

inline void require_very_clean(const Weight& w) {
  if (!w.very_clean) throw std::invalid_argument("weight '" + w.name + "' is not very clean");
}

// sigma_{inf,a,w}(X) as a surface integral in unscaled coordinates:
//   int dy2 dy3 w(y/X) / (3 y1^2),   y1 = cbrt(a - y2^3 - y3^3),
// with |y2|, |y3| integrated on a log scale over each sign quadrant.
inline double surface_integral(double a, double X, const Weight& w, const quad::Options& opt = {}) {
  require_very_clean(w);
  if (!(X > 0)) throw std::invalid_argument("X must be positive");
  const double X3 = X * X * X;
  if (std::fabs(a) >= w.a_tilde_max * X3) return 0.0;
  const double lo = std::log(w.coord_floor * X), hi = std::log(w.coord_ceiling * X);
  const double y1_floor = w.coord_floor * X;
  quad::Options inner = opt;
  inner.rel_tol = opt.rel_tol * 0.1;
  double total = 0;
  for (int s2 : {-1, 1}) {
    for (int s3 : {-1, 1}) {
      auto outer = [&](double l2) {
        const double y2 = s2 * std::exp(l2);
        auto in = [&](double l3) {
          const double y3 = s3 * std::exp(l3);
          const double y1 = std::cbrt(a - y2 * y2 * y2 - y3 * y3 * y3);
          if (std::fabs(y1) < y1_floor) return 0.0;
          const Vec3 u{y1 / X, y2 / X, y3 / X};
          if (w.in_support && !w.in_support(u)) return 0.0;
          const double v = w(u);
          if (v == 0) return 0.0;
          return v * std::fabs(y2 * y3) / (3 * y1 * y1);
        };
        return quad::integrate(in, lo, hi, inner);
      };
      total += quad::integrate(outer, lo, hi, opt);
    }
  }
  return total;
}

inline quad::Options surface_options() {
  quad::Options o;
  o.rel_tol = 1e-6;
  o.abs_floor = 1e-12;
  return o;
}

inline double sigma_inf(double a, double X, const Weight& w, const quad::Options& opt = surface_options()) {
  return surface_integral(a, X, w, opt);
}

// sigma_{inf, a~, w}(1) by the fastest available route.
inline double density_at(double a_tilde, const Weight& w) {
  require_very_clean(w);
  if (w.density) return w.density(a_tilde);
  return surface_integral(a_tilde, 1.0, w, surface_options());
}

// Piecewise-cubic (four-point Lagrange) interpolant on a uniform grid.
template <class T = double>
T cubic_interp(const std::vector<double>& v, double lo, double h, T x) {
  const long n = static_cast<long>(v.size());
  const T s = (x - T(lo)) / T(h);
  long i = static_cast<long>(std::floor(static_cast<double>(s))) - 1;
  i = std::clamp<long>(i, 0, n - 4);
  const T u = s - T(i);
  const T f0 = v[i], f1 = v[i + 1], f2 = v[i + 2], f3 = v[i + 3];
  return f0 * (u - 1) * (u - 2) * (u - 3) / T(-6) + f1 * u * (u - 2) * (u - 3) / T(2) +
         f2 * u * (u - 1) * (u - 3) / T(-2) + f3 * u * (u - 1) * (u - 2) / T(6);
}

class DensityTable {
 public:
  struct Validation {
    double max_rel_error = 0;  // relative to the largest table value
    double worst_a = 0;
    std::size_t grid_size = 0;
    bool refined = false;
  };

  static constexpr std::size_t kValidationPoints = 32;
  static constexpr double kValidationTol = 1e-3;

  DensityTable() = default;

  DensityTable(const Weight& w, std::size_t grid_size, std::uint64_t seed = 1) : weight_name_(w.name) {
    if (grid_size < 64) throw std::invalid_argument("density_table: grid_size must be >= 64");
    require_very_clean(w);
    amax_ = w.a_tilde_max;
    build(w, grid_size);
    validate(w, seed);
    if (validation_.max_rel_error >= kValidationTol) {
      build(w, 2 * grid_size - 1);
      validate(w, seed);
      validation_.refined = true;
      if (validation_.max_rel_error >= kValidationTol)
        throw std::runtime_error("density_table: interpolation error " + std::to_string(validation_.max_rel_error) +
                                 " at a~=" + std::to_string(validation_.worst_a) + " after refinement");
    }
  }

  // sigma_{inf, a~}(1); zero outside the grid.
  double operator()(double a_tilde) const { return eval<double>(a_tilde); }

  template <class T>
  T eval(T a_tilde) const {
    if (values_.empty() || !(a_tilde > T(-amax_) && a_tilde < T(amax_))) return T(0);
    return cubic_interp<T>(values_, -amax_, h_, a_tilde);
  }

  double at(double a, double X) const { return (*this)(a / (X * X * X)); }

  // Exact integral of the squared interpolant (4-point Gauss per cell is exact for degree 6).
  long double integral_of_square() const {
    if (values_.size() < 4) return 0;
    using G = boost::math::quadrature::gauss<long double, 4>;
    long double s = 0;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
      const long double a = -amax_ + h_ * double(i), b = a + h_;
      s += G::integrate([&](long double x) { long double v = eval<long double>(x); return v * v; }, a, b);
    }
    return s;
  }

  const std::vector<double>& values() const { return values_; }
  double a_max() const { return amax_; }
  double spacing() const { return h_; }
  double grid_point(std::size_t i) const { return -amax_ + h_ * double(i); }
  const Validation& validation() const { return validation_; }
  const std::string& weight_name() const { return weight_name_; }
  double max_value() const { return values_.empty() ? 0 : *std::max_element(values_.begin(), values_.end()); }

  void write_csv(std::ostream& os) const {
    os << "a_tilde,value\n";
    os.precision(17);
    for (std::size_t i = 0; i < values_.size(); ++i) os << grid_point(i) << ',' << values_[i] << '\n';
  }

 private:
  void build(const Weight& w, std::size_t n) {
    values_.assign(n, 0.0);
    if (amax_ <= 0) {
      h_ = 0;
      return;
    }
    h_ = 2 * amax_ / double(n - 1);
    for (std::size_t i = 1; i + 1 < n; ++i) values_[i] = std::max(0.0, density_at(grid_point(i), w));
  }

  void validate(const Weight& w, std::uint64_t seed) {
    validation_ = {};
    validation_.grid_size = values_.size();
    if (amax_ <= 0) return;
    const double scale = max_value();
    if (scale == 0) return;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-amax_, amax_);
    for (std::size_t k = 0; k < kValidationPoints; ++k) {
      const double a = U(rng);
      const double err = std::fabs((*this)(a)-density_at(a, w)) / scale;
      if (err > validation_.max_rel_error) {
        validation_.max_rel_error = err;
        validation_.worst_a = a;
      }
    }
  }

  std::string weight_name_;
  double amax_ = 0, h_ = 0;
  std::vector<double> values_;
  Validation validation_;
};

inline DensityTable density_table(const Weight& w, std::size_t grid_size = 256, std::uint64_t seed = 1) {
  return DensityTable(w, grid_size, seed);
}

// int sigma_{inf,a~}(1)^2 da~; independent of X by the rescaling law.
inline double pure_l2_moment(const Weight& w) {
  require_very_clean(w);
  if (w.a_tilde_max <= 0) return 0.0;
  quad::Options o;
  o.rel_tol = 1e-9;
  o.abs_floor = 1e-14;
  o.initial_cells = 12;
  return quad::integrate([&](double a) { const double s = density_at(a, w); return s * s; }, -w.a_tilde_max,
                         w.a_tilde_max, o);
}

// int nu(z) sigma_{inf,F0(z)}(1) dz as a three-fold integral: log|z2|, log|z3| outside,
// and t = F0(z) inside (dz1 = dt / (3 z1^2)); sigma is read from the table.
inline double mixed_l1_moment(const Weight& w, const DensityTable& table, double rel_tol = 2e-3) {
  require_very_clean(w);
  if (w.a_tilde_max <= 0) return 0.0;
  const double lo = std::log(w.coord_floor), hi = std::log(w.coord_ceiling);
  const double amax = w.a_tilde_max;
  // Absolute floors sized for O(1) moments, so thin slices are not resolved to
  // a relative accuracy they cannot affect.
  quad::Options outer_opt;
  outer_opt.rel_tol = rel_tol;
  outer_opt.abs_floor = rel_tol * 1e-2;
  quad::Options mid_opt = outer_opt;
  mid_opt.abs_floor = rel_tol * 1e-3;
  quad::Options in_opt = outer_opt;
  in_opt.abs_floor = rel_tol * 1e-4;
  in_opt.initial_cells = 1;
  double total = 0;
  for (int s2 : {-1, 1}) {
    for (int s3 : {-1, 1}) {
      auto outer = [&](double l2) {
        const double z2 = s2 * std::exp(l2);
        auto mid = [&](double l3) {
          const double z3 = s3 * std::exp(l3);
          const double c = z2 * z2 * z2 + z3 * z3 * z3;
          // z1 must satisfy |z1| >= floor; skip when the whole t-window violates it.
          if (std::max(std::fabs(std::cbrt(amax - c)), std::fabs(std::cbrt(-amax - c))) < w.coord_floor) return 0.0;
          auto in = [&](double t) {
            const double z1 = std::cbrt(t - c);
            if (std::fabs(z1) < w.coord_floor) return 0.0;
            const Vec3 z{z1, z2, z3};
            if (w.in_support && !w.in_support(z)) return 0.0;
            const double v = w(z);
            if (v == 0) return 0.0;
            return v * table(t) / (3 * z1 * z1);
          };
          return std::fabs(z2 * z3) * quad::integrate(in, -amax, amax, in_opt);
        };
        return quad::integrate(mid, lo, hi, mid_opt);
      };
      total += quad::integrate(outer, lo, hi, outer_opt);
    }
  }
  return total;
}

struct PoissonReport {
  double X = 0;
  std::uint64_t N = 1;
  std::int64_t b = 0;
  std::uint64_t terms = 0;
  long double sum = 0;             // sum over a = b mod N, |a| <= 3X^3 of sigma(a/X^3)^2
  long double main_term = 0;       // X^3 * pure / N
  long double interp_main = 0;     // X^3 * (integral of squared interpolant) / N
  double deviation = 0;            // |sum - main| / main
  double interp_deviation = 0;     // |sum - interp_main| / interp_main
};

// Riemann sum of sigma^2 over a progression against its integral. The sum is
// taken in long double so the interpolant-consistent deviation is resolved
// below double rounding.
inline PoissonReport poisson_check(const DensityTable& table, double pure, std::uint64_t X, std::uint64_t N,
                                   std::int64_t b) {
  if (X < 1 || N < 1) throw std::invalid_argument("poisson_check: X, N must be >= 1");
  PoissonReport r;
  r.X = double(X);
  r.N = N;
  r.b = ((b % static_cast<std::int64_t>(N)) + static_cast<std::int64_t>(N)) % static_cast<std::int64_t>(N);
  const std::int64_t X3 = static_cast<std::int64_t>(X * X * X);
  const std::int64_t lim = 3 * X3;
  const std::int64_t n = static_cast<std::int64_t>(N);
  std::int64_t a = -lim + ((r.b - (-lim)) % n + n) % n;
  long double s = 0, comp = 0;
  for (; a <= lim; a += n) {
    const long double v = table.eval<long double>(static_cast<long double>(a) / X3);
    const long double term = v * v;
    const long double y = term - comp;
    const long double t = s + y;
    comp = (t - s) - y;
    s = t;
    ++r.terms;
  }
  r.sum = s;
  r.main_term = static_cast<long double>(X3) * pure / N;
  r.interp_main = static_cast<long double>(X3) * table.integral_of_square() / N;
  r.deviation = r.main_term == 0 ? 0.0 : double(std::fabs((r.sum - r.main_term) / r.main_term));
  r.interp_deviation = r.interp_main == 0 ? 0.0 : double(std::fabs((r.sum - r.interp_main) / r.interp_main));
  return r;
}

// Random support points: signs and log|y2|, log|y3| uniform, t = F0(y) uniform, y1 solved.
// Returns the point and its sampling weight for Monte-Carlo volume estimates.
struct SupportSample {
  Vec3 y;
  double weight;
};

inline SupportSample sample_shell(const Weight& w, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0, 1);
  const double lo = std::log(w.coord_floor), hi = std::log(w.coord_ceiling);
  const double s2 = U(rng) < 0.5 ? -1 : 1, s3 = U(rng) < 0.5 ? -1 : 1;
  const double y2 = s2 * std::exp(lo + (hi - lo) * U(rng));
  const double y3 = s3 * std::exp(lo + (hi - lo) * U(rng));
  const double t = w.a_tilde_max * (2 * U(rng) - 1);
  const double y1 = std::cbrt(t - y2 * y2 * y2 - y3 * y3 * y3);
  const double jac = 4 * (hi - lo) * (hi - lo) * 2 * w.a_tilde_max * std::fabs(y2 * y3) / (3 * y1 * y1);
  return {{y1, y2, y3}, jac};
}

struct VolumeEstimate {
  double volume = 0;
  double std_error = 0;
  std::uint64_t samples = 0, hits = 0;
};

inline VolumeEstimate support_volume(const Weight& w, std::uint64_t samples, std::uint64_t seed) {
  if (!w.in_support) throw std::invalid_argument("support_volume needs an exact support test");
  std::mt19937_64 rng(seed);
  double s = 0, s2 = 0;
  VolumeEstimate v;
  v.samples = samples;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto p = sample_shell(w, rng);
    const double x = w.in_support(p.y) ? p.weight : 0.0;
    v.hits += x > 0;
    s += x;
    s2 += x * x;
  }
  const double n = double(samples);
  v.volume = s / n;
  v.std_error = std::sqrt(std::max(0.0, s2 / n - v.volume * v.volume) / n);
  return v;
}

namespace detail {

// Central-difference stencil of order m (0..3) along one axis: offsets (in units of h) and weights.
inline std::vector<std::pair<int, double>> fd_stencil(int m) {
  switch (m) {
    case 0: return {{0, 1.0}};
    case 1: return {{-1, -0.5}, {1, 0.5}};
    case 2: return {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
    case 3: return {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
    default: throw std::invalid_argument("finite differences implemented for order <= 3");
  }
}

}  // namespace detail

// d^alpha f(y) by tensor-product central differences with step h.
template <class F>
double partial_fd(F&& f, const Vec3& y, const std::array<int, 3>& alpha, double h) {
  const auto s0 = detail::fd_stencil(alpha[0]), s1 = detail::fd_stencil(alpha[1]), s2 = detail::fd_stencil(alpha[2]);
  double sum = 0;
  for (const auto& [o0, c0] : s0)
    for (const auto& [o1, c1] : s1)
      for (const auto& [o2, c2] : s2) sum += c0 * c1 * c2 * f(Vec3{y[0] + o0 * h, y[1] + o1 * h, y[2] + o2 * h});
  return sum / std::pow(h, alpha[0] + alpha[1] + alpha[2]);
}

struct SobolevProbe {
  double R = 0;
  std::uint64_t samples = 0;
  std::map<int, double> max_partial;  // k -> max over |alpha| = k
  std::map<int, double> norm;         // k -> max over |alpha| <= k
  std::map<int, Vec3> argmax;
};

// Sampled estimate of max |d^alpha nu| for |alpha| <= k_max over random support points.
// The step follows the local scale of the w0(F0) factor, whose y-derivative is 3 y_l^2 w0'.
inline SobolevProbe sobolev_probe(const Weight& w, int k_max, std::uint64_t samples, std::uint64_t seed) {
  if (k_max < 0 || k_max > 3) throw std::invalid_argument("sobolev_probe: k must be in [0,3]");
  std::mt19937_64 rng(seed);
  SobolevProbe p;
  p.R = w.R;
  p.samples = samples;
  std::vector<std::array<int, 3>> alphas;
  for (int i = 0; i <= k_max; ++i)
    for (int j = 0; i + j <= k_max; ++j)
      for (int k = 0; i + j + k <= k_max; ++k) alphas.push_back({i, j, k});
  for (int k = 0; k <= k_max; ++k) p.max_partial[k] = 0;
  std::uint64_t taken = 0;
  while (taken < samples) {
    const auto s = sample_shell(w, rng);
    if (w.in_support && !w.in_support(s.y)) continue;
    ++taken;
    const double m = std::max({std::fabs(s.y[0]), std::fabs(s.y[1]), std::fabs(s.y[2]), 1.0});
    const double h = 0.02 / (3 * m * m);
    for (const auto& al : alphas) {
      const int k = al[0] + al[1] + al[2];
      const double v = std::fabs(partial_fd(w.eval, s.y, al, h));
      if (v > p.max_partial[k]) {
        p.max_partial[k] = v;
        p.argmax[k] = s.y;
      }
    }
  }
  double run = 0;
  for (int k = 0; k <= k_max; ++k) {
    run = std::max(run, p.max_partial[k]);
    p.norm[k] = run;
  }
  return p;
}

struct DerivativeProbe {
  int k = 0;
  double step = 0;
  double max_abs = 0;
  double at = 0;
  double sobolev = 0;  // ||nu||_{k,inf} estimate used for the ratio
  double ratio = 0;    // max_abs / (sobolev * B^{10+4k})
  double max_one_sided_gap = 0;  // k = 1: |central - one-sided| / max_abs over smooth interior points
};

// Finite-difference derivatives in a~ of the density on a uniform interior grid.
inline DerivativeProbe derivative_probe(const Weight& w, int k, double sobolev_norm, std::size_t grid = 61,
                                        double h = 2.5e-3) {
  if (k < 0 || k > 3) throw std::invalid_argument("derivative_probe: k must be in [0,3]");
  require_very_clean(w);
  DerivativeProbe d;
  d.k = k;
  d.step = h;
  d.sobolev = sobolev_norm;
  if (w.a_tilde_max <= 0) return d;
  const auto st = detail::fd_stencil(k);
  auto f = [&](double a) { return density_at(a, w); };
  const double lo = -w.a_tilde_max + 4 * h, hi = w.a_tilde_max - 4 * h;
  std::vector<std::pair<double, double>> one_sided;
  for (std::size_t i = 0; i < grid; ++i) {
    const double a = lo + (hi - lo) * double(i) / double(grid - 1);
    double v = 0;
    for (const auto& [o, c] : st) v += c * f(a + o * h);
    v /= std::pow(h, k);
    if (std::fabs(v) > d.max_abs) {
      d.max_abs = std::fabs(v);
      d.at = a;
    }
    if (k == 1) {
      const double fwd = (-3 * f(a) + 4 * f(a + h) - f(a + 2 * h)) / (2 * h);
      one_sided.push_back({v, fwd});
    }
  }
  if (k == 1 && d.max_abs > 0) {
    for (const auto& [c, o] : one_sided) d.max_one_sided_gap = std::max(d.max_one_sided_gap, std::fabs(c - o) / d.max_abs);
  }
  const double denom = sobolev_norm * std::pow(double(w.B), 10 + 4 * k);
  d.ratio = denom > 0 ? d.max_abs / denom : 0.0;
  return d;
}

}  // namespace cubes
