#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubes/quadrature.hpp"
#include "cubes/t_cache.hpp"

namespace cubes {

using Vec3 = std::array<double, 3>;

using IVec3 = std::array<std::int64_t, 3>;

// Summed as (min + max) + mid, so the result is bitwise invariant under permuting
// the coordinates and odd under y -> -y.
inline double cube_form(const Vec3& y) {
  std::array<double, 3> c{y[0] * y[0] * y[0], y[1] * y[1] * y[1], y[2] * y[2] * y[2]};
  std::sort(c.begin(), c.end());
  return (c[0] + c[2]) + c[1];
}

inline std::int64_t cube_form(const IVec3& y) { return y[0] * y[0] * y[0] + y[1] * y[1] * y[1] + y[2] * y[2] * y[2]; }

enum class BumpKind { w0, w2 };

inline double ramp(double x) { return x > 0 ? std::exp(-1.0 / x) : 0.0; }

inline double step(double x) {
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double a = ramp(x), b = ramp(1 - x);
  return a / (a + b);
}

inline double w0(double t) { return step(3 - std::fabs(t)); }
inline double w2(double t) { return step(2 * (t - 0.5)) * step(11 - t); }

inline double bump(BumpKind kind, double t) { return kind == BumpKind::w0 ? w0(t) : w2(t); }

// |y1|, |y2|, |y3|, |y1+y2|, |y1+y3|, |y2+y3|, sorted
inline std::array<double, 6> linear_forms(const Vec3& y) {
  std::array<double, 6> L{std::fabs(y[0]), std::fabs(y[1]), std::fabs(y[2]),
                          std::fabs(y[0] + y[1]), std::fabs(y[0] + y[2]), std::fabs(y[1] + y[2])};
  std::sort(L.begin(), L.end());
  return L;
}

// Forms of y/X for an integer point; exact up to the final division.
inline std::array<double, 6> linear_forms(const IVec3& y, double X) {
  std::array<std::int64_t, 6> L{std::llabs(y[0]), std::llabs(y[1]), std::llabs(y[2]),
                                std::llabs(y[0] + y[1]), std::llabs(y[0] + y[2]), std::llabs(y[1] + y[2])};
  std::sort(L.begin(), L.end());
  std::array<double, 6> out{};
  for (int i = 0; i < 6; ++i) out[i] = double(L[i]) / X;
  return out;
}

// G(u) = prod_l w2(|u_l|) prod_{i<j} w2(|u_i+u_j|); nu* is w0(F0) times its log-scale average.
inline double g_profile(const Vec3& u) {
  double v = 1;
  for (double L : linear_forms(u)) {
    if (L <= 0.5 || L >= 11) return 0.0;
    v *= w2(L);
  }
  return v;
}

struct ScaleWindow {
  double lo = 1, hi = 0;  // admissible r with G(y/r) > 0, clipped to [1,R]
  bool empty() const { return !(lo < hi); }
};

inline ScaleWindow scale_window(const std::array<double, 6>& L, double R) {
  ScaleWindow w{1.0, R};
  for (double l : L) {
    w.lo = std::max(w.lo, l / 11);
    w.hi = std::min(w.hi, 2 * l);
  }
  return w;
}

// Integral over r in [1,R] of G(y/r) dr/r, in the variable s = log r.
inline quad::Options scale_options() {
  quad::Options o;
  o.rel_tol = 1e-8;
  o.abs_floor = 1e-14;
  o.initial_cells = 1;
  return o;
}

inline double scale_integral(const std::array<double, 6>& L, double R, const quad::Options& opt = scale_options()) {
  const auto win = scale_window(L, R);
  if (win.empty()) return 0.0;
  std::vector<double> cuts;
  cuts.reserve(24);
  for (double l : L) {
    for (double c : {l / 11, l / 10, l, 2 * l})
      if (c > win.lo && c < win.hi) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(win.hi);
  auto integrand = [&](double s) {
    const double r = std::exp(s);
    double v = 1;
    for (double l : L) v *= w2(l / r);
    return v;
  };
  double total = 0, lo = win.lo;
  for (double hi : cuts) {
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi);
    bool plateau = true;
    for (double l : L) plateau = plateau && mid >= l / 10 && mid <= l;
    if (plateau) {
      total += std::log(hi / lo);
    } else {
      total += quad::integrate(integrand, std::log(lo), std::log(hi), opt);
    }
    lo = hi;
  }
  return total;
}

inline double scale_integral(const Vec3& y, double R, const quad::Options& opt = scale_options()) {
  return scale_integral(linear_forms(y), R, opt);
}

// nu* from F0(y) and the sorted linear forms of y.
inline double nu_star_forms(double f, const std::array<double, 6>& L, double R,
                            const quad::Options& opt = scale_options()) {
  if (std::fabs(f) >= 3) return 0.0;
  const double a = w0(f);
  if (a == 0) return 0.0;
  return a * scale_integral(L, R, opt);
}

inline double nu_star(const Vec3& y, double R, const quad::Options& opt = scale_options()) {
  if (R < 2) throw std::invalid_argument("nu_star requires R >= 2, got " + std::to_string(R));
  return nu_star_forms(cube_form(y), linear_forms(y), R, opt);
}

inline bool nu_star_support(const Vec3& y, double R) {
  if (std::fabs(cube_form(y)) >= 3) return false;
  return !scale_window(linear_forms(y), R).empty();
}

// Phi(t): integral of G over the surface F0(u) = t with the measure du2 du3 / (3 u1^2).
// sigma_{inf, a, nu*}(1) = w0(a) * int_1^R Phi(a / r^3) dr / r.
class ShellProfile {
 public:
  static constexpr double kTMax = 3.0;

  static double direct(double t, const quad::Options& opt) {
    // Support of G: |u_l| in (1/2, 11); integrate log|u2|, log|u3| over each sign quadrant.
    const double lo = std::log(0.5), hi = std::log(11.0);
    quad::Options inner = opt;
    inner.rel_tol = opt.rel_tol * 0.1;
    double total = 0;
    for (int s2 : {-1, 1}) {
      for (int s3 : {-1, 1}) {
        auto outer = [&](double l2) {
          const double u2 = s2 * std::exp(l2);
          auto in = [&](double l3) {
            const double u3 = s3 * std::exp(l3);
            const double u1 = std::cbrt(t - u2 * u2 * u2 - u3 * u3 * u3);
            if (std::fabs(u1) <= 0.5) return 0.0;
            const double g = g_profile({u1, u2, u3});
            if (g == 0) return 0.0;
            return g * std::fabs(u2 * u3) / (3 * u1 * u1);
          };
          return quad::integrate(in, lo, hi, inner);
        };
        total += quad::integrate(outer, lo, hi, opt);
      }
    }
    return total;
  }

  // Nodes t_i = i*h on [0, 3]; Phi is even (u -> -u maps F0 = t to F0 = -t and fixes G).
  ShellProfile(std::size_t nodes, const quad::Options& opt = default_options()) : n_(nodes) {
    if (nodes < 8) throw std::invalid_argument("shell profile needs >= 8 nodes");
    h_ = kTMax / double(n_ - 1);
    values_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) values_[i] = direct(h_ * double(i), opt);
  }

  ShellProfile(std::vector<double> values) : n_(values.size()), values_(std::move(values)) {
    if (n_ < 8) throw std::invalid_argument("shell profile needs >= 8 nodes");
    h_ = kTMax / double(n_ - 1);
  }

  static quad::Options default_options() {
    quad::Options o;
    o.rel_tol = 1e-8;
    o.abs_floor = 1e-11;
    return o;
  }

  // Cubic Lagrange interpolation on the four nearest nodes.
  double operator()(double t) const {
    t = std::fabs(t);
    if (t > kTMax) return direct(t, default_options());
    const double x = t / h_;
    long i = static_cast<long>(std::floor(x)) - 1;
    i = std::min<long>(i, static_cast<long>(n_) - 4);
    const double u = x - double(i);
    auto node = [&](long j) { return values_[static_cast<std::size_t>(j < 0 ? -j : j)]; };
    const double f0 = node(i), f1 = node(i + 1), f2 = node(i + 2), f3 = node(i + 3);
    return f0 * (u - 1) * (u - 2) * (u - 3) / -6 + f1 * u * (u - 2) * (u - 3) / 2 +
           f2 * u * (u - 1) * (u - 3) / -2 + f3 * u * (u - 1) * (u - 2) / 6;
  }

  const std::vector<double>& values() const { return values_; }
  double spacing() const { return h_; }

  static constexpr std::size_t kDefaultNodes = 31;

  // Process-wide profile; read from / written to the cache directory when one is configured.
  static std::shared_ptr<const ShellProfile> shared(std::size_t nodes = kDefaultNodes) {
    static std::mutex mu;
    static std::map<std::size_t, std::shared_ptr<const ShellProfile>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[nodes];
    if (slot) return slot;
    const auto dir = resolve_cache_dir(cache_dir_flag());
    std::optional<std::filesystem::path> file;
    if (dir) file = *dir / ("phi_" + std::to_string(nodes) + ".cbp");
    if (file) {
      if (auto v = read_profile(*file, nodes)) {
        slot = std::make_shared<const ShellProfile>(std::move(*v));
        return slot;
      }
    }
    slot = std::make_shared<const ShellProfile>(nodes);
    if (file) write_profile(*file, slot->values());
    return slot;
  }

  static std::string& cache_dir_flag() {
    static std::string flag;
    return flag;
  }

 private:
  static constexpr std::array<char, 4> kMagic{'C', 'B', 'P', '1'};

  static void write_profile(const std::filesystem::path& file, const std::vector<double>& v) {
    std::filesystem::create_directories(file.parent_path());
    auto tmp = file;
    tmp += ".tmp";
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) return;
      os.write(kMagic.data(), 4);
      detail::put_u64(os, v.size());
      for (double x : v) detail::put_u64(os, std::bit_cast<u64>(x));
      if (!os) return;
    }
    std::filesystem::rename(tmp, file);
  }

  static std::optional<std::vector<double>> read_profile(const std::filesystem::path& file, std::size_t nodes) {
    std::ifstream is(file, std::ios::binary);
    if (!is) return std::nullopt;
    std::array<char, 4> magic{};
    u64 n = 0;
    if (!is.read(magic.data(), 4) || magic != kMagic || !detail::get_u64(is, n) || n != nodes) return std::nullopt;
    std::vector<double> v(n);
    for (auto& x : v) {
      u64 bits = 0;
      if (!detail::get_u64(is, bits)) return std::nullopt;
      x = std::bit_cast<double>(bits);
    }
    return v;
  }

 private:
  std::size_t n_;
  double h_ = 0;
  std::vector<double> values_;
};

struct Weight {
  std::string name;
  std::function<double(const Vec3&)> eval;
  std::function<bool(const Vec3&)> in_support;  // exact support test; used for lattice pruning
  // nu(y/X) at an integer point; defaults to eval on the rescaled point.
  std::function<double(const IVec3&, double)> lattice_eval;
  double R = 0;
  std::uint64_t B = 1;
  double coord_floor = 0;    // every support point has all |y_l| >= coord_floor
  double coord_ceiling = 0;  // and all |y_l| <= coord_ceiling
  double a_tilde_max = 0;    // |F0| < a_tilde_max on the support
  bool clean = false, very_clean = false, symmetric = false;
  std::map<int, double> sobolev_est;
  // Optional fast route for sigma_{inf, a~, nu}(1); falls back to surface quadrature.
  std::function<double(double)> density;

  double operator()(const Vec3& y) const { return eval(y); }

  double at_lattice(const IVec3& y, double X) const {
    if (lattice_eval) return lattice_eval(y, X);
    return eval({double(y[0]) / X, double(y[1]) / X, double(y[2]) / X});
  }
};

inline double nu_star_density(double a_tilde, double R, const ShellProfile& phi, const quad::Options& opt = {}) {
  if (std::fabs(a_tilde) >= 3) return 0.0;
  const double w = w0(a_tilde);
  if (w == 0) return 0.0;
  if (a_tilde == 0) return w * phi(0) * std::log(R);
  auto f = [&](double s) { return phi(a_tilde * std::exp(-3 * s)); };
  return w * quad::integrate(f, 0, std::log(R), opt);
}

inline Weight make_nu_star(double R, bool with_profile = true) {
  if (R < 2) throw std::invalid_argument("nu_star requires R >= 2, got " + std::to_string(R));
  Weight w;
  w.name = "nu_star";
  w.R = R;
  w.eval = [R](const Vec3& y) { return nu_star(y, R); };
  w.in_support = [R](const Vec3& y) { return nu_star_support(y, R); };
  w.lattice_eval = [R](const IVec3& y, double X) {
    return nu_star_forms(double(cube_form(y)) / (X * X * X), linear_forms(y, X), R);
  };
  w.B = static_cast<std::uint64_t>(std::ceil(11 * R));
  w.coord_floor = 0.5;
  w.coord_ceiling = 11 * R;
  w.a_tilde_max = 3;
  w.clean = w.very_clean = w.symmetric = true;
  if (with_profile) {
    auto phi = ShellProfile::shared();
    w.density = [R, phi](double a) { return nu_star_density(a, R, *phi); };
  }
  return w;
}

// w0(F0(y)) G(y): a single-scale very clean symmetric weight, cheap to evaluate.
inline Weight make_shell_bump() {
  Weight w;
  w.name = "shell_bump";
  w.R = 1;
  w.eval = [](const Vec3& y) {
    const double f = cube_form(y);
    if (std::fabs(f) >= 3) return 0.0;
    return w0(f) * g_profile(y);
  };
  w.in_support = [](const Vec3& y) {
    if (std::fabs(cube_form(y)) >= 3) return false;
    for (double L : linear_forms(y))
      if (L <= 0.5 || L >= 11) return false;
    return true;
  };
  w.B = 11;
  w.coord_floor = 0.5;
  w.coord_ceiling = 11;
  w.a_tilde_max = 3;
  w.clean = w.very_clean = w.symmetric = true;
  return w;
}

inline Weight make_zero_weight() {
  Weight w;
  w.name = "zero";
  w.eval = [](const Vec3&) { return 0.0; };
  w.in_support = [](const Vec3&) { return false; };
  w.B = 1;
  w.coord_floor = 1;
  w.coord_ceiling = 1;
  w.a_tilde_max = 0;
  w.clean = w.very_clean = w.symmetric = true;
  w.density = [](double) { return 0.0; };
  return w;
}

}  // namespace cubes
