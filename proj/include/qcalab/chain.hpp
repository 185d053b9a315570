#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qcalab/kernels.hpp"
#include "qcalab/types.hpp"

namespace qcalab {

enum class Boundary { Open, Periodic };

struct ChainSpec {
  int num_sites = 0;
  std::vector<int> local_dims;
  Boundary boundary = Boundary::Periodic;
  std::size_t max_dim = std::size_t{1} << 12;    // full-chain operators
  std::size_t max_state = std::size_t{1} << 20;  // Choi state amplitudes

  static ChainSpec uniform(int n, int d, Boundary b = Boundary::Periodic);

  void validate() const;
  // Product of local dimensions; saturates instead of overflowing.
  std::size_t total_dim() const;
  std::size_t dim_of(const std::vector<int>& sites) const;
  void require_dense() const;  // throws DimensionCap

  int wrap(int n) const;
  int dist(int a, int b) const;
  bool same_geometry(const ChainSpec& o) const;

  // Coarse-grained chain: site s groups sites [s*g, s*g+g).
  ChainSpec blocked(int g) const;
  // Prime factors of the local dimensions, ascending.
  std::vector<int> primes() const;
};

// Sorted, duplicate-free set of sites. Operator matrices on a region use
// ascending site order for their tensor factors.
struct Region {
  std::vector<int> sites;
  bool is_interval = false;

  Region() = default;
  explicit Region(std::vector<int> s, bool interval = false);

  std::size_t size() const { return sites.size(); }
  bool empty() const { return sites.empty(); }
  bool contains(int s) const;
  bool subset_of(const Region& o) const;
  bool operator==(const Region& o) const { return sites == o.sites; }

  static Region all(const ChainSpec& c);
  // Contiguous interval of `len` sites starting at `start` (wraps on rings).
  static Region interval(const ChainSpec& c, int start, int len);
  Region unite(const Region& o) const;
  Region intersect(const Region& o) const;
  Region complement(const ChainSpec& c) const;
  // B(X, r) with the chain metric.
  Region ball(const ChainSpec& c, int r) const;
  // Positions of this region's sites inside `outer` (which must contain it).
  std::vector<int> positions_in(const Region& outer) const;
};

struct ChainOperator {
  Region support;
  std::vector<int> dims;  // local dims of support sites, ascending order
  Mat m;

  std::size_t dim() const { return static_cast<std::size_t>(m.rows()); }
};

std::vector<int> dims_of(const ChainSpec& c, const Region& r);
ChainOperator make_op(const ChainSpec& c, const Region& r, const Mat& m);
ChainOperator identity_op(const ChainSpec& c, const Region& r);
// Operator `m` given on `sites` in the listed order (need not be sorted).
ChainOperator make_op_ordered(const ChainSpec& c, const std::vector<int>& sites, const Mat& m);

ChainOperator embed(const ChainSpec& c, const ChainOperator& op, const Region& target);
// E onto `onto`: normalized partial trace over the rest, tensored with
// identity; result keeps the support of `op` (extended by `onto` if needed).
ChainOperator conditional_expectation(const ChainSpec& c, const ChainOperator& op, const Region& onto);
// Normalized partial trace only, as an operator on onto (which must be
// contained in the support after extension).
ChainOperator reduce_to(const ChainSpec& c, const ChainOperator& op, const Region& onto);

double operator_norm(const ChainOperator& op);
double commutator_norm(const ChainSpec& c, const ChainOperator& a, const ChainOperator& b);

struct DistResult {
  ChainOperator witness;
  double eps = 0.0;
};
DistResult dist_to_region(const ChainSpec& c, const ChainOperator& op, const Region& region);

// Operators on a common support.
ChainOperator multiply(const ChainSpec& c, const ChainOperator& a, const ChainOperator& b);
ChainOperator add(const ChainSpec& c, const ChainOperator& a, const ChainOperator& b, cplx beta = 1.0);

// HS-orthonormal (tr(a^dag b)/d) spanning set of unitaries on a region:
// products of single-site Weyl operators. `include_identity` keeps the first.
std::vector<ChainOperator> weyl_basis(const ChainSpec& c, const Region& r, bool include_identity);
// Matrix units |i><j| of the region, index i*d + j.
std::vector<Mat> matrix_units(int d);

}  // namespace qcalab
