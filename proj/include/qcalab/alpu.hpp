#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcalab/choi.hpp"
#include "qcalab/hamiltonian.hpp"
#include "qcalab/index_value.hpp"

namespace qcalab {

// ---- tails ---------------------------------------------------------------

enum class TailMethod { RegionDistance, CommutatorSup };
const char* tail_method_name(TailMethod m);

struct TailProfile {
  TailMethod method = TailMethod::RegionDistance;
  std::vector<int> r;
  std::vector<double> raw;
  std::vector<double> f_hat;  // max over r' >= r of raw, entries <= 1e-12 set to 0
  int certified_radius = -1;
};
// Sweeps intervals of length <= max_len and their Weyl bases.
TailProfile measure_tails(const Automorphism& a, int r_max, TailMethod m = TailMethod::RegionDistance,
                          int max_len = 1);

using DecayFn = std::function<double(double)>;

// 4 sum_{n,m >= 0} F(n + m + r + 1), summed along diagonals.
double lr_tail_formula(const DecayFn& F, int r);

struct ReproducingReport {
  std::vector<double> ratio;  // R(s) = max_{d(n,m)=s} sum_l F(d(n,l)) F(d(l,m)) / F(s)
  double C = 0.0;             // max_s R(s)
  int failure_separation = -1;  // first s with R(s) >= 1.5 R(s/2)
  bool first_ok = false;
  double row_sum = 0.0;         // sup_n sum_m F(d(n,m))
  double row_sum_growth = 0.0;  // relative change when the chain doubles
  bool uniform_ok = false;
  bool reproducing = false;
  bool expected = false;  // F(r) = (1+r)^-(D+eps) class with D = 1
};
ReproducingReport reproducing_check(const DecayFn& F, const ChainSpec& c,
                                    std::optional<double> power_law_exponent = std::nullopt);

// G(n, m) = max over single-site Weyl x at n, y at m of ||[alpha(x), y]||.
RMat single_site_commutators(const Automorphism& a);

struct SetBoundReport {
  int samples = 0;
  int violations = 0;
  double max_lhs = 0.0;
  double max_ratio = 0.0;  // lhs / (128 sum G)
};
// Random unitaries on sampled interval pairs of length <= 2.
SetBoundReport single_site_to_sets(const Automorphism& a, const RMat& G, int samples, std::uint64_t seed);

// ---- patch localization and approximation --------------------------------

struct LocalizeReport {
  Automorphism result;
  double eps_initial = 0.0;
  int sweeps = 0;
  bool converged = false;
  double final_residual = 0.0;
  std::vector<double> step_norms;  // ||I - u|| for every applied rotation
  double distance = 0.0;           // ||alpha_n - alpha||, exact for conjugations
};
// Alternating rotations enforcing alpha(B_m) in C_m C_{m+1} (m = n..n+2)
// and alpha^-1(C_m) in B_{m-1} B_m (m = n+1, n+2) on a dense ring map.
LocalizeReport localize_patch(const Automorphism& a, int n, int max_sweeps = 20);

struct ApproxResult {
  int j = 1;
  Automorphism beta;
  std::vector<double> lower;  // per blocked site
  std::vector<double> upper;
  double dist_lower = 0.0;
  double dist_upper = 0.0;
  double gram_gap = 0.0;  // distance of the Gram spectrum from the 1/2 cut
  IndexValue index;
  std::string note;
};
// Radius-2 QCA on the chain blocked by j, built from the approximate
// support algebras of an index-zero map.
ApproxResult qca_approximate(const Automorphism& a, int j, std::uint64_t seed = 17);

struct ApproxSweep {
  std::vector<ApproxResult> rows;
  bool decreasing = false;
  bool stabilized = false;
  double stabilized_index = 0.0;
};
ApproxSweep approximation_sweep(const Automorphism& a, const std::vector<int>& js, std::uint64_t seed = 17);

// ---- synthesis -----------------------------------------------------------

struct TermLog {
  int segment = 0;
  int diameter = 0;
  double norm = 0.0;
};
struct Synthesis {
  HamiltonianModel model;  // on the base chain, evolve(model, 1) reproduces q
  std::vector<TermLog> terms;
  double residual = 0.0;
  int phase_retries = 0;
};
Synthesis synthesize_hamiltonian(const Automorphism& q, std::uint64_t seed = 23);

// ---- Jordan-Wigner translation -------------------------------------------

struct JwReport {
  int N = 0;
  double single_particle_residual = 0.0;
  double fock_residual = 0.0;
  std::vector<double> coeff;  // |h_r|, r = 0..N/2
  double coeff_ratio_min = 0.0;  // min r |h_r| over 1 <= r <= N/2
  double coeff_ratio_max = 0.0;
  bool coeff_ok = false;
  std::vector<double> s_values;
  std::vector<TailProfile> tails;  // e^{iHs} of the translation H
  std::vector<TailProfile> reference_tails;  // exp-decaying H, same ring
  bool slow_decay = false;
  std::string sector_note;
};
// H = sum h_{n-m} c_n^dag c_m with exp(i h) the cyclic shift.
JwReport jw_translation_demo(int N, const std::vector<double>& s_values = {0.25, 0.5, 0.75});
// Single-particle hopping matrix.
Mat jw_hopping(int N);
// Its second quantization on N qubits through Jordan-Wigner strings.
Mat jw_fock_hamiltonian(int N);

}  // namespace qcalab
