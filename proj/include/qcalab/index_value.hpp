#pragma once

#include <utility>
#include <vector>

namespace qcalab {

// Raw index estimate and its nearest point on Z[log p_i].
struct IndexValue {
  double raw = 0.0;
  std::vector<std::pair<int, int>> lattice;  // (prime, coefficient)
  double rounded = 0.0;
  double residual = 0.0;
};

// Enumerates sum k_i log p_i with |k_i| <= kmax and keeps the nearest point;
// ties go to the smaller sum of |k_i|.
IndexValue round_index(double raw, const std::vector<int>& primes, int kmax = 4);

}  // namespace qcalab
