#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace cubes::quad {

struct Options {
  double rel_tol = 1e-8;
  double abs_floor = 1e-14;
  unsigned max_depth = 30;
  unsigned initial_cells = 4;
};

// Globally adaptive Gauss-Kronrod (7/15): the cell with the largest error
// estimate is bisected until the summed estimate drops below
// max(rel_tol * L1, abs_floor) or the cell budget runs out.
template <class F>
double integrate(F&& f, double a, double b, const Options& opt = {}, double* error = nullptr) {
  if (!(b > a)) {
    if (error) *error = 0;
    return 0.0;
  }
  struct Cell {
    double lo, hi, value, err, l1;
    unsigned depth;
    bool operator<(const Cell& o) const { return err < o.err; }
  };
  auto g = [&](double x) { return f(x); };
  auto make = [&](double lo, double hi, unsigned depth) {
    Cell c{lo, hi, 0, 0, 0, depth};
    double l1 = 0;
    c.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, lo, hi, 0, 0, &c.err, &l1);
    c.l1 = l1;
    return c;
  };
  std::priority_queue<Cell> heap;
  const unsigned n0 = std::max(1u, opt.initial_cells);
  const double h = (b - a) / n0;
  double value = 0, err = 0, l1 = 0;
  for (unsigned i = 0; i < n0; ++i) {
    const Cell c = make(a + h * i, i + 1 == n0 ? b : a + h * (i + 1), 0);
    value += c.value;
    err += c.err;
    l1 += c.l1;
    heap.push(c);
  }
  std::size_t budget = std::size_t{1} << std::min(opt.max_depth, 20u);
  while (!heap.empty() && err > std::max(opt.rel_tol * l1, opt.abs_floor) && budget-- > 0) {
    const Cell c = heap.top();
    if (c.depth >= opt.max_depth) break;
    heap.pop();
    const double m = 0.5 * (c.lo + c.hi);
    const Cell left = make(c.lo, m, c.depth + 1), right = make(m, c.hi, c.depth + 1);
    value += left.value + right.value - c.value;
    err += left.err + right.err - c.err;
    l1 += left.l1 + right.l1 - c.l1;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the cells to drop the drift of the running updates.
  value = 0;
  err = 0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().err;
    heap.pop();
  }
  if (error) *error = err;
  return value;
}

// Integral over [a,b] split at the sorted breakpoints lying strictly inside.
template <class F>
double integrate_pieces(F&& f, double a, double b, std::vector<double> cuts, const Options& opt = {}) {
  std::sort(cuts.begin(), cuts.end());
  double sum = 0, lo = a;
  for (double c : cuts) {
    if (c <= lo || c >= b) continue;
    sum += integrate(f, lo, c, opt);
    lo = c;
  }
  return sum + integrate(f, lo, b, opt);
}

}  // namespace cubes::quad
