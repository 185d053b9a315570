#include "qcalab/index_value.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace qcalab {

IndexValue round_index(double raw, const std::vector<int>& primes, int kmax) {
  IndexValue v;
  v.raw = raw;
  const std::size_t n = primes.size();
  std::vector<int> k(n, -kmax), best(n, 0);
  double best_err = std::numeric_limits<double>::infinity();
  int best_l1 = 0;
  if (n == 0) best_err = std::abs(raw);
  while (n > 0) {
    double val = 0.0;
    int l1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      val += k[i] * std::log(static_cast<double>(primes[i]));
      l1 += std::abs(k[i]);
    }
    const double err = std::abs(raw - val);
    if (err < best_err - 1e-12 || (std::abs(err - best_err) <= 1e-12 && l1 < best_l1)) {
      best_err = err;
      best_l1 = l1;
      best = k;
    }
    std::size_t i = 0;
    while (i < n && k[i] == kmax) k[i++] = -kmax;
    if (i == n) break;
    ++k[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    v.lattice.emplace_back(primes[i], best[i]);
    v.rounded += best[i] * std::log(static_cast<double>(primes[i]));
  }
  v.residual = std::abs(raw - v.rounded);
  return v;
}

}  // namespace qcalab
