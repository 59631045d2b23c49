// Prints T_a(n) for a few moduli together with the point counts N_a(n).

#include <cstdio>
#include <cstdlib>

#include "cubes/exp_sums.hpp"

using namespace cubes;

int main(int argc, char** argv) {
  std::vector<u64> moduli{4, 7, 8, 9, 13};
  if (argc > 1) {
    moduli.clear();
    for (int i = 1; i < argc; ++i) moduli.push_back(std::strtoull(argv[i], nullptr, 10));
  }
  TTable table;
  for (u64 n : moduli) {
    if (n == 0) continue;
    const auto& t = table.full(n);
    const auto& counts = table.point_counts(n);
    std::printf("n = %llu\n  a     T_a(n)   N_a(n)\n", (unsigned long long)n);
    i64 sum = 0;
    for (u64 a = 0; a < n; ++a) {
      std::printf("%3llu %10lld %8llu\n", (unsigned long long)a, (long long)t.values[a], (unsigned long long)counts[a]);
      sum += t.values[a];
    }
    std::printf("  sum over a: %lld\n\n", (long long)sum);
  }
}
