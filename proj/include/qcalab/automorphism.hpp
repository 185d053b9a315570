#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "qcalab/chain.hpp"

namespace qcalab {

// Gate on base sites (ascending); u uses ascending factor order.
struct Gate {
  std::vector<int> sites;
  Mat u;
};

// One factor S of U = S_1 S_2 ... S_m.
struct Step {
  enum class Kind { Permutation, Layer };
  Kind kind = Kind::Layer;
  // P|s> = |t> with t_n = s_{perm[n]}; an operator on site m is carried to
  // site perm[m] by x -> P^dag x P.
  std::vector<int> perm;
  std::vector<Gate> gates;  // disjoint
};

struct Circuit {
  ChainSpec base;
  std::vector<Step> steps;
};

enum class LocalityKind { ExactRadius, Measured, Unknown };

struct Locality {
  LocalityKind kind = LocalityKind::Unknown;
  int radius = -1;
  std::vector<double> profile;  // f_hat(r), r = 0, 1, ...
  static Locality exact(int r) { return {LocalityKind::ExactRadius, r, {}}; }
};

// alpha(x) = U^dag x U on a (possibly blocked) chain. The map is carried by
// a dense unitary, a structured circuit, or both. Operators passed in and
// returned live on the logical chain; logical site s stands for base sites
// [s*block, s*block + block).
class Automorphism {
 public:
  static Automorphism from_unitary(const ChainSpec& c, const Mat& u, Locality loc = {});
  static Automorphism from_circuit(Circuit circ, Locality loc = {});
  static Automorphism identity(const ChainSpec& c);

  const ChainSpec& chain() const { return chain_; }
  const ChainSpec& base() const { return base_; }
  int block() const { return block_; }
  const Locality& locality() const { return locality_; }
  Automorphism with_locality(Locality loc) const;

  bool has_circuit() const { return static_cast<bool>(circuit_); }
  const Circuit& circuit() const { return *circuit_; }
  bool dense_available() const;
  // Materialized on first use; throws DimensionCap past the chain cap.
  const Mat& unitary() const;

  ChainOperator apply(const ChainOperator& x) const;
  ChainOperator apply_inverse(const ChainOperator& x) const;

  Automorphism inverse() const;
  Automorphism blocked(int g) const;

  // Logical region -> base sites and back (full logical blocks).
  Region to_base(const Region& r) const;
  Region to_logical(const Region& base_region) const;

 private:
  struct Dense {
    std::once_flag once;
    Mat u;
  };
  ChainOperator run(const ChainOperator& x, bool inverse) const;

  ChainSpec chain_;
  ChainSpec base_;
  int block_ = 1;
  Locality locality_;
  std::shared_ptr<const Circuit> circuit_;
  std::shared_ptr<Dense> dense_;
};

// (q1 o q2)(x) = q1(q2(x)).
Automorphism compose(const Automorphism& q1, const Automorphism& q2);
// Sitewise tensor product; logical site s carries q1's block then q2's.
Automorphism tensor(const Automorphism& q1, const Automorphism& q2);

// Unitary matrix of a single circuit step on the base chain.
Mat step_matrix(const ChainSpec& base, const Step& s);

// Reduced density of the Choi state on originals X and primed copies Y
// (logical regions); index (i_X, j_Y) with X digits most significant.
Mat choi_marginal(const Automorphism& a, const Region& X, const Region& Y);

}  // namespace qcalab
