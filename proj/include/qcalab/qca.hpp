#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcalab/algebra.hpp"
#include "qcalab/automorphism.hpp"
#include "qcalab/index_value.hpp"

namespace qcalab {

// Translation by k sites: alpha(x at n) = x at n - k.
Automorphism shift_qca(const ChainSpec& c, int k);

// Layers applied in order (first layer acts first on operators). The radius
// is the smallest one certified by verify_radius.
Automorphism circuit_qca(const ChainSpec& c, const std::vector<std::vector<Gate>>& layers);

struct RadiusCheck {
  bool ok = false;
  double residual = 0.0;
  int max_len = 0;  // longest interval swept
};
// Sweeps intervals of length up to min(N/2, max_len); checks the images of
// the single-site Weyl generators against B(X, r).
RadiusCheck verify_radius(const Automorphism& a, int r, int max_len = 4);

// Blocks a map with a certified radius so that it becomes nearest-neighbor
// with an even number of blocked sites (at least four on rings).
Automorphism nearest_neighbor_form(const Automorphism& a);
inline Automorphism block(const Automorphism& a, int g) { return a.blocked(g); }

// B_n = {2n, 2n+1}, C_n = {2n-1, 2n} on the (blocked) chain.
Region pair_b(const ChainSpec& c, int n);
Region pair_c(const ChainSpec& c, int n);

// L_n and R_{n-1}, both inside the operators on C_n.
struct SupportAlgebras {
  int n = 0;
  Region region;  // C_n
  OperatorAlgebra L;
  OperatorAlgebra R;
};
SupportAlgebras support_algebras(const Automorphism& nn, int n);

struct DimensionIndex {
  IndexValue value;
  std::vector<double> per_block;  // raw value at every n
  double spread = 0.0;
  int block = 1;                  // blocking used (relative to the input)
  std::vector<std::string> warnings;
};
DimensionIndex index_dimension(const Automorphism& a);

struct Decomposition {
  Automorphism recomposed;   // two-layer circuit, blocked like the nn form
  std::vector<Gate> u_layer;  // base-chain gates on the B pairs
  std::vector<Gate> v_layer;  // base-chain gates on the C pairs
  double residual = 0.0;      // max single-site ||q(x) - rec(x)||
  double max_u_dist = 0.0;    // max ||u_n - I|| after phase alignment
  double max_v_dist = 0.0;
  int block = 1;
};
// alpha(x) = V^dag U^dag x U V with U on the B pairs, V on the C pairs.
Decomposition decompose_index_zero(const Automorphism& a);

// Building blocks of the two-layer form. aligning_unitary returns v on C_n
// with v L v^dag the operators on site 2n and v R v^dag those on 2n - 1,
// corrected by a product unitary to lie as close to the identity as it can.
Mat aligning_unitary(const ChainSpec& c, int n, const Factor& L, const Factor& R);
// Steps [U on the B pairs, V on the C pairs], so alpha(x) = V^dag U^dag x U V.
Automorphism two_layer_map(const Automorphism& nn, const std::vector<Mat>& u, const std::vector<Mat>& v,
                           Locality loc);

struct BlendResult {
  Automorphism gamma;
  int n0 = 0;  // first pair following q2
  int n_r = 0; // first pair following q1 again
  double left_agreement = 0.0;   // vs q1 on pairs outside [n0, n_r)
  double inner_agreement = 0.0;  // vs q2 on pairs strictly inside the collar
  int inner_pairs = 0;
  double index = 0.0;
};
// Equal to q1 away from the pairs [n0, n_r) and to q2 inside them, with the
// two interfaces matched by unitaries on C_{n0} and C_{n_r}. `cut` is a site
// of the nearest-neighbor chain.
BlendResult blend(const Automorphism& q1, const Automorphism& q2, int cut);

struct RobustnessPoint {
  double strength = 0.0;
  double eps_hat = 0.0;  // restricted distance upper bound on 2-block intervals
  IndexValue index;
  bool unchanged = false;
  double witness_norm = 0.0;
  bool witness_ok = false;
  bool factorization_ok = true;
  std::string note;
};
// Perturbs a radius-1 QCA on a ring by a layer of near-identity two-site
// gates of the given strengths and recomputes the index and the witness
// unitary between the left support algebras.
std::vector<RobustnessPoint> robustness_experiment(const Automorphism& q, const std::vector<double>& strengths,
                                                   std::uint64_t seed);

// Random test material.
std::vector<Gate> random_pair_layer(const ChainSpec& c, int offset, Rng& rng);
std::vector<Gate> random_site_layer(const ChainSpec& c, Rng& rng);
// Two staggered layers of Haar two-site gates (radius <= 2).
Automorphism random_two_layer_circuit(const ChainSpec& c, Rng& rng);

// max ||a - b|| after embedding into the joint support.
double op_distance(const ChainSpec& c, const ChainOperator& a, const ChainOperator& b);

}  // namespace qcalab
