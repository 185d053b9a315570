#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcalab/automorphism.hpp"
#include "qcalab/index_value.hpp"

namespace qcalab {

enum class Entropy { VonNeumann, Renyi2 };
const char* entropy_name(Entropy e);

// Pure state on the doubled chain (originals, then primed copies) with
// amplitudes psi(i, j) = U_ij / sqrt(D).
struct ChoiState {
  ChainSpec chain;
  CVec psi;
  int doubled_sites() const { return 2 * chain.num_sites; }
  std::vector<int> doubled_dims() const;
};
ChoiState choi_state(const Automorphism& a);

// Natural-log entropies; eigenvalues below `floor` in magnitude count as 0.
double entropy(const Mat& rho, Entropy e, double floor = 1e-12);
// Reduced density on doubled-chain sites (primed copy of n is n + N).
Mat reduced_state(const ChoiState& s, const Region& doubled);
double mutual_information(const ChoiState& s, const Region& A, const Region& B, Entropy e);

struct MiIndex {
  IndexValue value;
  double i_primed_left = 0.0;   // I(L':R)
  double i_primed_right = 0.0;  // I(L:R')
  bool certified = false;       // exact radius <= window
};
// 1/2 (I(L':R) - I(L:R')) with L = [cut - w, cut), R = [cut, cut + w).
MiIndex index_mi(const Automorphism& a, int cut, int window, Entropy e = Entropy::VonNeumann);
// 1/2 (S(L R') - S(L' R)).
double index_entropy_diff(const Automorphism& a, int cut, int window);

struct ContinuityReport {
  double eps_lower = 0.0;
  double eps_upper = 0.0;
  double trace_distance = 0.0;  // restricted Choi states on X u X'
  double delta_index = 0.0;
  double bound = 0.0;
  bool ok = true;
};
ContinuityReport mi_continuity_experiment(const Automorphism& a1, const Automorphism& a2, int cut, int window,
                                          std::uint64_t seed = 9);

}  // namespace qcalab
