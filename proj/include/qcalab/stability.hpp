#pragma once

#include <cstdint>
#include <vector>

#include "qcalab/algebra.hpp"
#include "qcalab/automorphism.hpp"

namespace qcalab {

// Maps Phi_i defined on mutually commuting source algebras (all on one
// ambient), each close to the inclusion.
struct NearHomomorphism {
  std::vector<OperatorAlgebra> sources;
  std::vector<LinearMap> maps;
  std::vector<double> gammas;  // measured sup ||Phi_i(a) - a|| / ||a||

  double eps() const;
  // Verifies unitality, *-multiplicativity (on matrix units) and that the
  // sources commute; measures gammas on basis elements, matrix units and
  // random unitaries.
  static NearHomomorphism make(std::vector<OperatorAlgebra> sources, std::vector<LinearMap> maps,
                               std::uint64_t seed = 11, double tol = 1e-9);
};

struct InnerResult {
  Mat u;
  double eps = 0.0;
  double residual = 0.0;       // max ||Phi_i(a) - u^dag a u||
  double dist_identity = 0.0;  // ||I - u||
  double bound = 0.0;          // sqrt(2) eps / (1 + sqrt(1 - eps^2))^(1/2)
  bool bound_ok = false;
  double smin = 0.0;
};

// Averages y <- sum_b (1/k_b) sum_ij e_ij y Phi(e_ji) over every source,
// starting from y = I, and returns the unitary part of y.
InnerResult make_inner(const NearHomomorphism& h, double tol = 1e-8);

struct RotateResult {
  Mat u;
  double eps_in = 0.0;
  double dist_identity = 0.0;
  double inclusion_residual = 0.0;
  bool bound_ok = false;  // ||I - u|| <= 12 eps_in
  bool dilation = false;  // Stinespring route (else matrix-unit lifting)
  double spectral_spread = 0.0;
};

struct RotateOptions {
  double max_eps = 1.0 / 64.0;
  std::size_t dilation_cap = std::size_t{1} << 14;
  bool force_lifting = false;
};

// u with u^dag a u contained in the target factor (which must span the
// ambient of a, i.e. k*m = d).
RotateResult rotate_into(const OperatorAlgebra& a, const Factor& target, const RotateOptions& opt = {});
// Target is the full algebra of a sub-region of a's ambient region.
RotateResult rotate_into(const ChainSpec& c, const OperatorAlgebra& a, const Region& target,
                         const RotateOptions& opt = {});

// Matrix units of the algebra of `sub` inside the operators on `ambient`.
Factor region_factor(const ChainSpec& c, const Region& ambient, const Region& sub);

// max over sampled c of ||[z, c]|| / (||z|| ||c||)
double commutator_delta(const Mat& z, const std::vector<Mat>& cs);

// ||ad_u - ad_v||: diameter of the smallest disk holding spec(v u^dag).
double conjugation_distance(const Mat& u, const Mat& v);
// Smallest enclosing circle of points in the plane: center and radius.
std::pair<cplx, double> enclosing_circle(std::vector<cplx> pts);

struct RestrictedDistance {
  double lower = 0.0;
  double upper = 0.0;
};
// Distance of x -> U1^dag x U1 and x -> U2^dag x U2 on the unit ball of A_X.
RestrictedDistance restricted_distance(const ChainSpec& c, const Mat& u1, const Mat& u2, const Region& X,
                                       std::uint64_t seed = 3, int probes = 8, int ascent = 25);

struct LocalErrorReport {
  std::vector<RestrictedDistance> blocks;
  double eps = 0.0;           // sum of block upper bounds
  double global_lower = 0.0;  // search over the full unit ball
  double global_exact = 0.0;  // conjugation distance
  double bound = 0.0;         // 2 sqrt(2) eps
  bool ok = true;
};
LocalErrorReport homomorphism_local_error_check(const Automorphism& a1, const Automorphism& a2,
                                                const std::vector<Region>& blocks, std::uint64_t seed = 5);

// Random instances on three qubits: conjugation by exp(itK) near the
// identity, with t drawn so that the measured eps stays below eps_max.
struct StabilityTrial {
  double eps = 0.0;
  double dist_identity = 0.0;
  double residual = 0.0;
  double bound = 0.0;  // sqrt(2) eps for make_inner, 12 eps for rotate_into
  bool ok = false;
};
StabilityTrial make_inner_trial(Rng& rng, double eps_max = 0.3);
StabilityTrial rotate_into_trial(Rng& rng, double eps_max = 1.0 / 64.0);

struct LemmaSuite {
  int draws = 0;
  int powers_violations = 0;
  double powers_max_ratio = 0.0;  // lhs / rhs
  int polar_violations = 0;
  double polar_max_ratio = 0.0;
};
LemmaSuite commutator_lemma_suite(std::uint64_t seed, int draws = 1000);

}  // namespace qcalab
