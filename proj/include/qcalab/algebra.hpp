#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "qcalab/chain.hpp"
#include "qcalab/linalg.hpp"

namespace qcalab {

// One simple summand M_k (x) I_m, with a system of matrix units.
struct Factor {
  int k = 1;
  int m = 1;
  Mat projection;          // central projection (sum of e_ii)
  std::vector<Mat> units;  // e_ij stored at i*k + j

  const Mat& unit(int i, int j) const { return units[static_cast<std::size_t>(i * k + j)]; }
  // Isometry whose columns are e_{i1} g_s, with g_s an orthonormal basis of
  // the range of e_11. In these coordinates the factor is M_k (x) I_m.
  Mat frame() const;
  // Residual of e_ij e_kl = delta_jk e_il and sum_i e_ii = projection.
  double unit_residual() const;
};

struct Wedderburn {
  int center_dim = 0;
  std::vector<Factor> factors;
};

// Finite-dimensional *-algebra inside the operators on `region`, stored as
// an orthonormal basis for <a, b> = tr(a^dag b) / d. Column k of `basis` is
// vec(b_k) / sqrt(d) (column-major), so the columns are orthonormal vectors.
class OperatorAlgebra {
 public:
  OperatorAlgebra() = default;
  OperatorAlgebra(Region region, std::vector<int> dims, Mat basis);

  static OperatorAlgebra full(const ChainSpec& c, const Region& r);
  // Span of the given matrix units (one or more factors).
  static OperatorAlgebra from_units(const Region& r, std::vector<int> dims, const std::vector<Factor>& fs);

  const Region& region() const { return region_; }
  const std::vector<int>& dims() const { return dims_; }
  int ambient() const { return d_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Mat& basis() const { return basis_; }

  Mat element(int k) const;
  std::vector<Mat> elements() const;
  ChainOperator element_op(int k) const;

  // Orthogonal projection for the normalized HS product; this is the
  // trace-preserving conditional expectation onto the algebra.
  Mat project(const Mat& x) const;
  double residual(const Mat& x) const;  // ||x - project(x)|| / ||x||

  Mat random_element(Rng& rng) const;
  Mat random_hermitian(Rng& rng) const;
  Mat random_unitary(Rng& rng) const;

  // Lazily computed; write-once.
  const Wedderburn& structure() const;
  bool is_factor() const { return structure().factors.size() == 1; }

 private:
  struct Lazy {
    std::once_flag once;
    Wedderburn w;
  };
  Region region_;
  std::vector<int> dims_;
  int d_ = 1;
  Mat basis_;
  std::shared_ptr<Lazy> lazy_ = std::make_shared<Lazy>();
};

Mat vec(const Mat& x);
Mat unvec(const Eigen::Ref<const CVec>& v, int d);

// Smallest unital *-closed span containing the generators (all on `region`).
OperatorAlgebra algebra_closure(const Region& region, const std::vector<int>& dims, const std::vector<Mat>& gens,
                                double rank_rel = 1e-9, std::size_t max_ambient = 256);
OperatorAlgebra algebra_closure(const ChainSpec& c, const std::vector<ChainOperator>& gens, double rank_rel = 1e-9);

// Center, minimal central projections and matrix units. Retries up to five
// times on degenerate random spectra before throwing DegenerateSpectrum.
Wedderburn wedderburn(const OperatorAlgebra& alg, std::uint64_t seed = 0x5eed);

// Max over the basis of dist_to_region eps.
double near_inclusion_eps(const ChainSpec& c, const OperatorAlgebra& alg, const Region& region);
// Same, with an algebra on the same ambient as codomain.
double near_inclusion_eps(const OperatorAlgebra& alg, const OperatorAlgebra& target);

// Relative commutant of a factor inside all operators on its ambient.
Factor commutant_factor(const Factor& f);

using LinearMap = std::function<Mat(const Mat&)>;

// u with theta(a) = u^dag a u on the factor f. Throws NotAnAutomorphism if
// theta fails multiplicativity on the matrix units.
Mat inner_unitary_of_automorphism(const Factor& f, const LinearMap& theta, std::uint64_t seed = 7,
                                  double tol = 1e-8);

// Polar part of y = sum_i e_i1 x theta(e_1i), without any checks; for an
// approximate automorphism this is the nearby intertwiner.
Mat intertwiner_polar(const Factor& f, const LinearMap& theta, std::uint64_t seed = 7);

// All of M_d with its standard matrix units.
Factor full_factor(int d);

// Unitary u with u a u^dag ranging over `target` as a ranges over `source`
// (factors with equal k and m); maps unit e^s_ij to e^t_ij.
struct AlgebraIso {
  Mat unitary_witness;
  double residual = 0.0;
};
AlgebraIso factor_iso(const Factor& source, const Factor& target);

}  // namespace qcalab
