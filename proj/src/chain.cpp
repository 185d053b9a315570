#include "qcalab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qcalab/linalg.hpp"

namespace qcalab {

ChainSpec ChainSpec::uniform(int n, int d, Boundary b) {
  ChainSpec c;
  c.num_sites = n;
  c.local_dims.assign(static_cast<std::size_t>(std::max(n, 0)), d);
  c.boundary = b;
  c.validate();
  return c;
}

void ChainSpec::validate() const {
  if (num_sites <= 0) throw Error(ErrorCode::InvalidArgument, "num_sites must be positive");
  if (static_cast<int>(local_dims.size()) != num_sites)
    throw Error(ErrorCode::InvalidArgument, "local_dims length differs from num_sites");
  for (int d : local_dims)
    if (d < 2) throw Error(ErrorCode::InvalidArgument, "local dimensions must be >= 2");
}

std::size_t ChainSpec::total_dim() const {
  std::size_t t = 1;
  for (int d : local_dims) {
    if (t > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(d))
      return std::numeric_limits<std::size_t>::max();
    t *= static_cast<std::size_t>(d);
  }
  return t;
}

std::size_t ChainSpec::dim_of(const std::vector<int>& sites) const {
  std::size_t t = 1;
  for (int s : sites) t *= static_cast<std::size_t>(local_dims[s]);
  return t;
}

void ChainSpec::require_dense() const {
  if (total_dim() > max_dim)
    throw Error(ErrorCode::DimensionCap,
                "chain dimension " + std::to_string(total_dim()) + " exceeds cap " + std::to_string(max_dim));
}

int ChainSpec::wrap(int n) const { return ((n % num_sites) + num_sites) % num_sites; }

int ChainSpec::dist(int a, int b) const {
  const int d = std::abs(a - b);
  return boundary == Boundary::Periodic ? std::min(d, num_sites - d) : d;
}

bool ChainSpec::same_geometry(const ChainSpec& o) const {
  return num_sites == o.num_sites && local_dims == o.local_dims && boundary == o.boundary;
}

ChainSpec ChainSpec::blocked(int g) const {
  if (g <= 0 || num_sites % g != 0) throw Error(ErrorCode::SpecMismatch, "block size must divide num_sites");
  ChainSpec c = *this;
  c.num_sites = num_sites / g;
  c.local_dims.assign(static_cast<std::size_t>(c.num_sites), 1);
  for (int s = 0; s < num_sites; ++s) c.local_dims[s / g] *= local_dims[s];
  return c;
}

std::vector<int> ChainSpec::primes() const {
  std::vector<int> ps;
  for (int d : local_dims) {
    int x = d;
    for (int p = 2; p * p <= x; ++p)
      while (x % p == 0) {
        ps.push_back(p);
        x /= p;
      }
    if (x > 1) ps.push_back(x);
  }
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  return ps;
}

Region::Region(std::vector<int> s, bool interval) : sites(std::move(s)), is_interval(interval) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
}

bool Region::contains(int s) const { return std::binary_search(sites.begin(), sites.end(), s); }

bool Region::subset_of(const Region& o) const {
  return std::includes(o.sites.begin(), o.sites.end(), sites.begin(), sites.end());
}

Region Region::all(const ChainSpec& c) {
  std::vector<int> s(static_cast<std::size_t>(c.num_sites));
  std::iota(s.begin(), s.end(), 0);
  return Region(s, true);
}

Region Region::interval(const ChainSpec& c, int start, int len) {
  if (len < 0 || len > c.num_sites) throw Error(ErrorCode::RegionMismatch, "interval length out of range");
  std::vector<int> s;
  for (int k = 0; k < len; ++k) {
    const int site = start + k;
    if (c.boundary == Boundary::Open) {
      if (site < 0 || site >= c.num_sites) throw Error(ErrorCode::RegionMismatch, "interval leaves open chain");
      s.push_back(site);
    } else {
      s.push_back(c.wrap(site));
    }
  }
  return Region(s, true);
}

Region Region::unite(const Region& o) const {
  std::vector<int> s;
  std::set_union(sites.begin(), sites.end(), o.sites.begin(), o.sites.end(), std::back_inserter(s));
  return Region(s);
}

Region Region::intersect(const Region& o) const {
  std::vector<int> s;
  std::set_intersection(sites.begin(), sites.end(), o.sites.begin(), o.sites.end(), std::back_inserter(s));
  return Region(s);
}

Region Region::complement(const ChainSpec& c) const {
  std::vector<int> s;
  for (int k = 0; k < c.num_sites; ++k)
    if (!contains(k)) s.push_back(k);
  return Region(s);
}

Region Region::ball(const ChainSpec& c, int r) const {
  std::vector<int> s;
  for (int k = 0; k < c.num_sites; ++k)
    for (int x : sites)
      if (c.dist(k, x) <= r) {
        s.push_back(k);
        break;
      }
  return Region(s);
}

std::vector<int> Region::positions_in(const Region& outer) const {
  std::vector<int> pos;
  pos.reserve(sites.size());
  for (int s : sites) {
    auto it = std::lower_bound(outer.sites.begin(), outer.sites.end(), s);
    if (it == outer.sites.end() || *it != s) throw Error(ErrorCode::RegionMismatch, "site outside region");
    pos.push_back(static_cast<int>(it - outer.sites.begin()));
  }
  return pos;
}

std::vector<int> dims_of(const ChainSpec& c, const Region& r) {
  std::vector<int> d;
  d.reserve(r.size());
  for (int s : r.sites) {
    if (s < 0 || s >= c.num_sites) throw Error(ErrorCode::RegionMismatch, "site index out of range");
    d.push_back(c.local_dims[s]);
  }
  return d;
}

ChainOperator make_op(const ChainSpec& c, const Region& r, const Mat& m) {
  ChainOperator op{r, dims_of(c, r), m};
  const std::size_t d = c.dim_of(r.sites);
  if (static_cast<std::size_t>(m.rows()) != d || m.rows() != m.cols())
    throw Error(ErrorCode::RegionMismatch, "matrix size does not match region dimension");
  return op;
}

ChainOperator identity_op(const ChainSpec& c, const Region& r) {
  const auto d = static_cast<Eigen::Index>(c.dim_of(r.sites));
  return make_op(c, r, Mat::Identity(d, d));
}

ChainOperator make_op_ordered(const ChainSpec& c, const std::vector<int>& sites, const Mat& m) {
  Region r(sites);
  if (r.size() != sites.size()) throw Error(ErrorCode::RegionMismatch, "repeated site in operator support");
  std::vector<int> dims;
  for (int s : sites) dims.push_back(c.local_dims[s]);
  // output factor k (sorted) is input factor perm[k]
  std::vector<int> perm(sites.size());
  for (std::size_t k = 0; k < r.sites.size(); ++k)
    perm[k] = static_cast<int>(std::find(sites.begin(), sites.end(), r.sites[k]) - sites.begin());
  return make_op(c, r, kernels::permute_factors(m, dims, perm));
}

ChainOperator embed(const ChainSpec& c, const ChainOperator& op, const Region& target) {
  if (!op.support.subset_of(target)) throw Error(ErrorCode::RegionMismatch, "support not contained in target");
  if (op.support == target) return op;
  const auto tdims = dims_of(c, target);
  SplitIndex s(tdims, op.support.positions_in(target));
  return ChainOperator{target, tdims, kernels::embed(op.m, s)};
}

ChainOperator reduce_to(const ChainSpec& c, const ChainOperator& op, const Region& onto) {
  const Region ext = op.support.unite(onto);
  const ChainOperator full = embed(c, op, ext);
  SplitIndex s(full.dims, onto.positions_in(ext));
  Mat red = kernels::partial_trace(full.m, s) / static_cast<double>(s.rest_dim);
  return ChainOperator{onto, dims_of(c, onto), red};
}

ChainOperator conditional_expectation(const ChainSpec& c, const ChainOperator& op, const Region& onto) {
  const Region keep = onto.intersect(op.support);
  return embed(c, reduce_to(c, op, keep), op.support);
}

double operator_norm(const ChainOperator& op) { return op_norm(op.m); }

ChainOperator multiply(const ChainSpec& c, const ChainOperator& a, const ChainOperator& b) {
  const Region u = a.support.unite(b.support);
  const ChainOperator ea = embed(c, a, u), eb = embed(c, b, u);
  return ChainOperator{u, ea.dims, ea.m * eb.m};
}

ChainOperator add(const ChainSpec& c, const ChainOperator& a, const ChainOperator& b, cplx beta) {
  const Region u = a.support.unite(b.support);
  const ChainOperator ea = embed(c, a, u), eb = embed(c, b, u);
  return ChainOperator{u, ea.dims, ea.m + beta * eb.m};
}

double commutator_norm(const ChainSpec& c, const ChainOperator& a, const ChainOperator& b) {
  const Region u = a.support.unite(b.support);
  const ChainOperator ea = embed(c, a, u), eb = embed(c, b, u);
  return op_norm(ea.m * eb.m - eb.m * ea.m);
}

DistResult dist_to_region(const ChainSpec& c, const ChainOperator& op, const Region& region) {
  const double n = operator_norm(op);
  if (!(n > 0.0)) throw Error(ErrorCode::ZeroOperator, "distance of the zero operator is undefined");
  DistResult r{conditional_expectation(c, op, region), 0.0};
  r.eps = op_norm(op.m - r.witness.m) / n;
  return r;
}

std::vector<ChainOperator> weyl_basis(const ChainSpec& c, const Region& r, bool include_identity) {
  const auto dims = dims_of(c, r);
  std::vector<Mat> cur{Mat::Identity(1, 1)};
  for (int d : dims) {
    std::vector<Mat> next;
    next.reserve(cur.size() * d * d);
    for (const Mat& m : cur)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) next.push_back(kron(m, weyl(d, a, b)));
    cur.swap(next);
  }
  std::vector<ChainOperator> out;
  out.reserve(cur.size());
  for (std::size_t k = include_identity ? 0 : 1; k < cur.size(); ++k) out.push_back(ChainOperator{r, dims, cur[k]});
  return out;
}

std::vector<Mat> matrix_units(int d) {
  std::vector<Mat> e;
  e.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Mat m = Mat::Zero(d, d);
      m(i, j) = 1.0;
      e.push_back(m);
    }
  return e;
}

}  // namespace qcalab
