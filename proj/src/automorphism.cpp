#include "qcalab/automorphism.hpp"

#include <algorithm>
#include <numeric>

#include "qcalab/linalg.hpp"

namespace qcalab {

namespace {

void validate_circuit(const Circuit& c) {
  c.base.validate();
  const int n = c.base.num_sites;
  for (const Step& s : c.steps) {
    if (s.kind == Step::Kind::Permutation) {
      if (static_cast<int>(s.perm.size()) != n) throw Error(ErrorCode::InvalidArgument, "permutation length");
      std::vector<char> seen(n, 0);
      for (int k = 0; k < n; ++k) {
        const int p = s.perm[k];
        if (p < 0 || p >= n || seen[p]) throw Error(ErrorCode::InvalidArgument, "not a permutation");
        if (c.base.local_dims[k] != c.base.local_dims[p])
          throw Error(ErrorCode::InvalidArgument, "permutation mixes local dimensions");
        seen[p] = 1;
      }
    } else {
      std::vector<char> used(n, 0);
      for (const Gate& g : s.gates) {
        if (!std::is_sorted(g.sites.begin(), g.sites.end()) || g.sites.empty())
          throw Error(ErrorCode::InvalidArgument, "gate sites must be sorted and nonempty");
        for (int x : g.sites) {
          if (x < 0 || x >= n) throw Error(ErrorCode::RegionMismatch, "gate site out of range");
          if (used[x]) throw Error(ErrorCode::OverlapInLayer, "gates overlap at site " + std::to_string(x));
          used[x] = 1;
        }
        if (static_cast<std::size_t>(g.u.rows()) != c.base.dim_of(g.sites) || g.u.rows() != g.u.cols())
          throw Error(ErrorCode::RegionMismatch, "gate size does not match its sites");
      }
    }
  }
}

std::vector<int> invert_perm(const std::vector<int>& p) {
  std::vector<int> q(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) q[p[k]] = static_cast<int>(k);
  return q;
}

// Column map of a site permutation: (U P)|s> = U|t(s)>.
std::vector<Eigen::Index> perm_targets(const ChainSpec& c, const std::vector<int>& perm) {
  const int n = c.num_sites;
  const std::size_t total = c.total_dim();
  std::vector<std::size_t> stride(n, 1);
  for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * c.local_dims[k + 1];
  std::vector<Eigen::Index> t(total);
  std::vector<int> digit(n);
  for (std::size_t s = 0; s < total; ++s) {
    std::size_t rem = s;
    for (int k = n - 1; k >= 0; --k) {
      digit[k] = static_cast<int>(rem % c.local_dims[k]);
      rem /= c.local_dims[k];
    }
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k) idx += digit[perm[k]] * stride[k];
    t[s] = static_cast<Eigen::Index>(idx);
  }
  return t;
}

void right_multiply_step(Mat& u, const ChainSpec& base, const Step& s) {
  if (s.kind == Step::Kind::Permutation) {
    const auto t = perm_targets(base, s.perm);
    Mat out(u.rows(), u.cols());
    for (Eigen::Index col = 0; col < u.cols(); ++col) out.col(col) = u.col(t[col]);
    u.swap(out);
    return;
  }
  for (const Gate& g : s.gates) kernels::apply_right(u, g.u, SplitIndex(base.local_dims, g.sites));
}

}  // namespace

Automorphism Automorphism::from_unitary(const ChainSpec& c, const Mat& u, Locality loc) {
  c.validate();
  c.require_dense();
  if (static_cast<std::size_t>(u.rows()) != c.total_dim() || u.rows() != u.cols())
    throw Error(ErrorCode::RegionMismatch, "unitary size does not match chain");
  if (!is_unitary(u, default_tolerances().unitarity * std::max<double>(1.0, u.rows() / 64.0)))
    throw Error(ErrorCode::InvalidArgument, "matrix is not unitary");
  Automorphism a;
  a.chain_ = c;
  a.base_ = c;
  a.locality_ = std::move(loc);
  a.dense_ = std::make_shared<Dense>();
  std::call_once(a.dense_->once, [&] { a.dense_->u = u; });
  return a;
}

Automorphism Automorphism::from_circuit(Circuit circ, Locality loc) {
  validate_circuit(circ);
  Automorphism a;
  a.chain_ = circ.base;
  a.base_ = circ.base;
  a.locality_ = std::move(loc);
  a.circuit_ = std::make_shared<const Circuit>(std::move(circ));
  a.dense_ = std::make_shared<Dense>();
  return a;
}

Automorphism Automorphism::identity(const ChainSpec& c) { return from_circuit(Circuit{c, {}}, Locality::exact(0)); }

Automorphism Automorphism::with_locality(Locality loc) const {
  Automorphism a = *this;
  a.locality_ = std::move(loc);
  return a;
}

bool Automorphism::dense_available() const { return base_.total_dim() <= base_.max_dim; }

const Mat& Automorphism::unitary() const {
  if (!dense_available()) base_.require_dense();
  std::call_once(dense_->once, [&] {
    const auto d = static_cast<Eigen::Index>(base_.total_dim());
    Mat u = Mat::Identity(d, d);
    for (const Step& s : circuit_->steps) right_multiply_step(u, base_, s);
    dense_->u = std::move(u);
  });
  return dense_->u;
}

Region Automorphism::to_base(const Region& r) const {
  if (block_ == 1) return r;
  std::vector<int> s;
  s.reserve(r.size() * block_);
  for (int x : r.sites)
    for (int k = 0; k < block_; ++k) s.push_back(x * block_ + k);
  return Region(s, r.is_interval);
}

Region Automorphism::to_logical(const Region& b) const {
  if (block_ == 1) return b;
  std::vector<int> s;
  for (int x : b.sites) s.push_back(x / block_);
  return Region(s);
}

ChainOperator Automorphism::run(const ChainOperator& x, bool inv) const {
  if (static_cast<std::size_t>(x.m.rows()) != chain_.dim_of(x.support.sites))
    throw Error(ErrorCode::RegionMismatch, "operator does not match its support");
  if (!circuit_) {
    // one dense product: U^dag ((x (x) I) U), the bracket by a local kernel
    const Region all = Region::all(chain_);
    const SplitIndex sp(chain_.local_dims, x.support.sites);
    Mat t = inv ? Mat(unitary().adjoint()) : unitary();
    kernels::apply_left(t, x.m, sp);
    Mat y = inv ? Mat(unitary() * t) : Mat(unitary().adjoint() * t);
    return ChainOperator{all, chain_.local_dims, std::move(y)};
  }

  const Region bs = to_base(x.support);
  ChainOperator cur{bs, dims_of(base_, bs), x.m};
  const auto& steps = circuit_->steps;
  const int ns = static_cast<int>(steps.size());
  for (int k = 0; k < ns; ++k) {
    const Step& s = steps[inv ? ns - 1 - k : k];
    if (s.kind == Step::Kind::Permutation) {
      const std::vector<int> p = inv ? invert_perm(s.perm) : s.perm;
      std::vector<int> img;
      img.reserve(cur.support.size());
      for (int site : cur.support.sites) img.push_back(p[site]);
      cur = make_op_ordered(base_, img, cur.m);
      continue;
    }
    std::vector<const Gate*> touch;
    Region ext = cur.support;
    for (const Gate& g : s.gates)
      for (int site : g.sites)
        if (cur.support.contains(site)) {
          touch.push_back(&g);
          ext = ext.unite(Region(g.sites));
          break;
        }
    if (touch.empty()) continue;
    cur = embed(base_, cur, ext);
    for (const Gate* g : touch) {
      SplitIndex sp(cur.dims, Region(g->sites).positions_in(ext));
      if (inv) {
        kernels::apply_left(cur.m, g->u, sp);
        kernels::apply_right(cur.m, g->u.adjoint(), sp);
      } else {
        kernels::apply_left(cur.m, g->u.adjoint(), sp);
        kernels::apply_right(cur.m, g->u, sp);
      }
    }
  }
  const Region logical = to_logical(cur.support);
  cur = embed(base_, cur, to_base(logical));
  return ChainOperator{logical, dims_of(chain_, logical), std::move(cur.m)};
}

ChainOperator Automorphism::apply(const ChainOperator& x) const { return run(x, false); }
ChainOperator Automorphism::apply_inverse(const ChainOperator& x) const { return run(x, true); }

Automorphism Automorphism::inverse() const {
  Automorphism a = *this;
  a.dense_ = std::make_shared<Dense>();
  if (circuit_) {
    Circuit c{circuit_->base, {}};
    for (auto it = circuit_->steps.rbegin(); it != circuit_->steps.rend(); ++it) {
      Step s = *it;
      if (s.kind == Step::Kind::Permutation) {
        s.perm = invert_perm(s.perm);
      } else {
        for (Gate& g : s.gates) g.u = g.u.adjoint().eval();
      }
      c.steps.push_back(std::move(s));
    }
    a.circuit_ = std::make_shared<const Circuit>(std::move(c));
  } else {
    const Mat u = unitary().adjoint();
    std::call_once(a.dense_->once, [&] { a.dense_->u = u; });
  }
  return a;
}

Automorphism Automorphism::blocked(int g) const {
  Automorphism a = *this;
  a.chain_ = chain_.blocked(g);
  a.block_ = block_ * g;
  if (a.locality_.kind == LocalityKind::ExactRadius) a.locality_.radius = (a.locality_.radius + g - 1) / g;
  if (a.locality_.kind == LocalityKind::Measured) a.locality_ = Locality{};
  return a;
}

Automorphism compose(const Automorphism& q1, const Automorphism& q2) {
  if (!q1.chain().same_geometry(q2.chain()) || q1.block() != q2.block() || !q1.base().same_geometry(q2.base()))
    throw Error(ErrorCode::SpecMismatch, "compose needs identical chains and blockings");
  Locality loc;
  if (q1.locality().kind == LocalityKind::ExactRadius && q2.locality().kind == LocalityKind::ExactRadius)
    loc = Locality::exact(q1.locality().radius + q2.locality().radius);
  Automorphism out = [&] {
    if (q1.has_circuit() && q2.has_circuit()) {
      Circuit c{q1.base(), q2.circuit().steps};
      c.steps.insert(c.steps.end(), q1.circuit().steps.begin(), q1.circuit().steps.end());
      return Automorphism::from_circuit(std::move(c), loc);
    }
    return Automorphism::from_unitary(q1.base(), q2.unitary() * q1.unitary(), loc);
  }();
  return q1.block() == 1 ? out : out.blocked(q1.block());
}

Automorphism tensor(const Automorphism& q1, const Automorphism& q2) {
  if (q1.chain().num_sites != q2.chain().num_sites || q1.chain().boundary != q2.chain().boundary)
    throw Error(ErrorCode::SpecMismatch, "tensor needs chains of equal length and boundary");
  const int n = q1.chain().num_sites;
  const int g1 = q1.block(), g2 = q2.block(), g = g1 + g2;
  ChainSpec base;
  base.num_sites = n * g;
  base.boundary = q1.chain().boundary;
  base.max_dim = q1.base().max_dim;
  base.max_state = q1.base().max_state;
  std::vector<int> map1(n * g1), map2(n * g2);
  base.local_dims.resize(static_cast<std::size_t>(n * g));
  for (int b = 0; b < n * g1; ++b) {
    map1[b] = (b / g1) * g + b % g1;
    base.local_dims[map1[b]] = q1.base().local_dims[b];
  }
  for (int b = 0; b < n * g2; ++b) {
    map2[b] = (b / g2) * g + g1 + b % g2;
    base.local_dims[map2[b]] = q2.base().local_dims[b];
  }
  Locality loc;
  if (q1.locality().kind == LocalityKind::ExactRadius && q2.locality().kind == LocalityKind::ExactRadius)
    loc = Locality::exact(std::max(q1.locality().radius, q2.locality().radius));

  Automorphism out;
  if (q1.has_circuit() && q2.has_circuit()) {
    Circuit c{base, {}};
    auto lift = [&](const Circuit& src, const std::vector<int>& map) {
      for (const Step& s : src.steps) {
        Step t;
        t.kind = s.kind;
        if (s.kind == Step::Kind::Permutation) {
          t.perm.resize(static_cast<std::size_t>(base.num_sites));
          std::iota(t.perm.begin(), t.perm.end(), 0);
          for (std::size_t k = 0; k < map.size(); ++k) t.perm[map[k]] = map[s.perm[k]];
        } else {
          for (const Gate& gt : s.gates) {
            std::vector<int> sites;
            for (int x : gt.sites) sites.push_back(map[x]);
            // map is increasing, so factor order is kept
            t.gates.push_back(Gate{sites, gt.u});
          }
        }
        c.steps.push_back(std::move(t));
      }
    };
    lift(q1.circuit(), map1);
    lift(q2.circuit(), map2);
    out = Automorphism::from_circuit(std::move(c), loc);
  } else {
    base.require_dense();
    Mat u = kron(q1.unitary(), q2.unitary());
    // factor k of the kron product is base site inv[k]
    std::vector<int> order(map1);
    order.insert(order.end(), map2.begin(), map2.end());
    std::vector<int> kdims(order.size());
    std::vector<int> perm(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      kdims[k] = base.local_dims[order[k]];
      perm[order[k]] = static_cast<int>(k);
    }
    out = Automorphism::from_unitary(base, kernels::permute_factors(u, kdims, perm), loc);
  }
  return out.blocked(g);
}

Mat step_matrix(const ChainSpec& base, const Step& s) {
  const auto d = static_cast<Eigen::Index>(base.total_dim());
  Mat u = Mat::Identity(d, d);
  right_multiply_step(u, base, s);
  return u;
}

Mat choi_marginal(const Automorphism& a, const Region& X, const Region& Y) {
  const ChainSpec& c = a.chain();
  const auto dx = static_cast<Eigen::Index>(c.dim_of(X.sites));
  const auto dy = static_cast<Eigen::Index>(c.dim_of(Y.sites));
  if (static_cast<std::size_t>(dx * dy) > c.max_dim * 16)
    throw Error(ErrorCode::DimensionCap, "Choi marginal too large");

  if (!a.has_circuit()) {
    const std::size_t D = c.total_dim();
    if (D > c.max_state / D) throw Error(ErrorCode::DimensionCap, "Choi state exceeds amplitude cap");
    const Mat& u = a.unitary();
    const Eigen::Index n = static_cast<Eigen::Index>(D);
    CVec psi(n * n);
    const double s = 1.0 / std::sqrt(static_cast<double>(D));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) psi(i * n + j) = u(i, j) * s;
    std::vector<int> dims = c.local_dims;
    dims.insert(dims.end(), c.local_dims.begin(), c.local_dims.end());
    std::vector<int> pos = X.sites;
    for (int y : Y.sites) pos.push_back(c.num_sites + y);
    return kernels::reduced_density(psi, SplitIndex(dims, pos));
  }

  // rho_{(i,j),(i',j')} = [E_Y alpha(|i'><i|)]_{j' j} / d_Y
  Mat rho(dx * dy, dx * dy);
  for (Eigen::Index i = 0; i < dx; ++i)
    for (Eigen::Index ip = 0; ip < dx; ++ip) {
      Mat e = Mat::Zero(dx, dx);
      e(ip, i) = 1.0;
      const ChainOperator img = a.apply(ChainOperator{X, dims_of(c, X), e});
      const Mat r = reduce_to(c, img, Y).m;
      for (Eigen::Index j = 0; j < dy; ++j)
        for (Eigen::Index jp = 0; jp < dy; ++jp) rho(i * dy + j, ip * dy + jp) = r(jp, j) / static_cast<double>(dy);
    }
  return rho;
}

}  // namespace qcalab
