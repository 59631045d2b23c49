// Variance decomposition and E/X^3 for nu* at R = 2 over a few box sizes.

#include <cstdio>

#include "cubes/variance.hpp"

using namespace cubes;

int main() {
  const auto w = make_nu_star(2);
  std::printf("%4s %3s %14s %14s %14s %14s %10s %12s\n", "X", "K", "var", "sigma1", "sigma2", "sigma3", "decomp", "E/X^3");
  for (u64 X : {10u, 20u, 30u}) {
    const auto ctx = make_variance_context(X, w);
    const auto e = hl_error(ctx, 1);
    for (u64 K : {1u, 4u}) {
      const auto r = variance(ctx, K, 1);
      std::printf("%4llu %3llu %14.6f %14.6f %14.6f %14.6f %10.2e %12.6f\n", (unsigned long long)X,
                  (unsigned long long)K, r.var_direct, r.sigma1, r.sigma2, r.sigma3, r.decomposition_residual,
                  e.E_over_X3);
    }
  }
}
