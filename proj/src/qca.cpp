#include "qcalab/qca.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "qcalab/stability.hpp"

namespace qcalab {

namespace {

int gate_diameter(const ChainSpec& c, const std::vector<int>& sites) {
  int d = 0;
  for (int a : sites)
    for (int b : sites) d = std::max(d, c.dist(a, b));
  return d;
}

// Images of the single-site generators X and Z (Weyl form) at every site.
std::vector<std::vector<ChainOperator>> site_images(const Automorphism& a) {
  const ChainSpec& c = a.chain();
  std::vector<std::vector<ChainOperator>> out(static_cast<std::size_t>(c.num_sites));
  for (int s = 0; s < c.num_sites; ++s) {
    const int d = c.local_dims[s];
    for (const Mat& g : {weyl(d, 1, 0), weyl(d, 0, 1)}) out[s].push_back(a.apply(make_op(c, Region({s}), g)));
  }
  return out;
}

RadiusCheck check_images(const ChainSpec& c, const std::vector<std::vector<ChainOperator>>& img, int r, int max_len) {
  RadiusCheck rc;
  rc.max_len = std::max(1, std::min(c.num_sites / 2, max_len));
  for (int len = 1; len <= rc.max_len; ++len) {
    const int starts = c.boundary == Boundary::Periodic ? c.num_sites : c.num_sites - len + 1;
    for (int st = 0; st < starts; ++st) {
      const Region X = Region::interval(c, st, len);
      const Region ball = X.ball(c, r);
      for (int s : X.sites)
        for (const ChainOperator& y : img[s]) rc.residual = std::max(rc.residual, dist_to_region(c, y, ball).eps);
    }
  }
  rc.ok = rc.residual <= 1e-9;
  return rc;
}

// Gate on base sites from a matrix on sorted logical sites.
Gate to_base_gate(const Automorphism& a, const Region& logical, const Mat& m) {
  return Gate{a.to_base(logical).sites, m};
}

Mat full_matrix(const ChainSpec& c, const ChainOperator& x) { return embed(c, x, Region::all(c)).m; }

}  // namespace

double op_distance(const ChainSpec& c, const ChainOperator& a, const ChainOperator& b) {
  const Region u = a.support.unite(b.support);
  return op_norm(embed(c, a, u).m - embed(c, b, u).m);
}

Automorphism shift_qca(const ChainSpec& c, int k) {
  c.validate();
  if (k == 0) return Automorphism::identity(c);
  if (c.boundary == Boundary::Open) throw Error(ErrorCode::OpenChainUnsupported, "shifts need a periodic chain");
  for (int d : c.local_dims)
    if (d != c.local_dims[0]) throw Error(ErrorCode::InvalidArgument, "shifts need uniform local dimension");
  if (2 * std::abs(k) >= c.num_sites) throw Error(ErrorCode::InvalidArgument, "shift distance must be below N/2");
  Step s;
  s.kind = Step::Kind::Permutation;
  s.perm.resize(static_cast<std::size_t>(c.num_sites));
  for (int n = 0; n < c.num_sites; ++n) s.perm[n] = c.wrap(n - k);
  return Automorphism::from_circuit(Circuit{c, {s}}, Locality::exact(std::abs(k)));
}

Automorphism circuit_qca(const ChainSpec& c, const std::vector<std::vector<Gate>>& layers) {
  Circuit circ{c, {}};
  int bound = 0;
  for (const auto& layer : layers) {
    Step s;
    s.kind = Step::Kind::Layer;
    int widest = 0;
    for (const Gate& g : layer) widest = std::max(widest, gate_diameter(c, g.sites));
    bound += widest;
    s.gates = layer;
    circ.steps.push_back(std::move(s));
  }
  const Automorphism raw = Automorphism::from_circuit(std::move(circ));
  const auto img = site_images(raw);
  for (int r = 0; r <= bound; ++r)
    if (check_images(c, img, r, 4).ok) return raw.with_locality(Locality::exact(r));
  throw Error(ErrorCode::NumericalFailure, "circuit radius could not be certified");
}

RadiusCheck verify_radius(const Automorphism& a, int r, int max_len) {
  return check_images(a.chain(), site_images(a), r, max_len);
}

Automorphism nearest_neighbor_form(const Automorphism& a) {
  const ChainSpec& c = a.chain();
  if (a.locality().kind != LocalityKind::ExactRadius)
    throw Error(ErrorCode::InvalidArgument, "index computations need a certified radius");
  const int r = a.locality().radius;
  const int min_sites = c.boundary == Boundary::Periodic ? 4 : 2;
  for (int g = 1; g <= c.num_sites; ++g) {
    if (g < r || c.num_sites % g != 0) continue;
    const int n = c.num_sites / g;
    if (n % 2 != 0 || n < min_sites) continue;
    return g == 1 ? a : a.blocked(g);
  }
  throw Error(ErrorCode::InvalidArgument,
              "no blocking makes the map nearest-neighbor with an even number of sites (radius " +
                  std::to_string(r) + ", " + std::to_string(c.num_sites) + " sites)");
}

Region pair_b(const ChainSpec& c, int n) { return Region({c.wrap(2 * n), c.wrap(2 * n + 1)}); }
Region pair_c(const ChainSpec& c, int n) { return Region({c.wrap(2 * n - 1), c.wrap(2 * n)}); }

SupportAlgebras support_algebras(const Automorphism& nn, int n) {
  const ChainSpec& c = nn.chain();
  if (c.boundary != Boundary::Periodic) throw Error(ErrorCode::OpenChainUnsupported, "support algebras need a ring");
  if (c.num_sites % 2 != 0 || c.num_sites < 4)
    throw Error(ErrorCode::InvalidArgument, "support algebras need an even ring of at least four sites");
  SupportAlgebras sa;
  sa.n = n;
  sa.region = pair_c(c, n);
  const auto cdims = dims_of(c, sa.region);
  const int dc = static_cast<int>(c.dim_of(sa.region.sites));
  // generators E_C(alpha(e)) for the matrix units e of b
  auto images = [&](const Region& b) {
    const auto dims = dims_of(c, b);
    const int d = static_cast<int>(c.dim_of(b.sites));
    std::vector<Mat> gens;
    if (nn.has_circuit()) {
      for (const Mat& e : matrix_units(d)) gens.push_back(reduce_to(c, nn.apply(ChainOperator{b, dims, e}), sa.region).m);
    } else {
      // [E_C alpha(|p><q|)]_{j'j} = d_C rho((q, j), (p, j'))
      const Mat rho = choi_marginal(nn, b, sa.region);
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) {
          Mat g(dc, dc);
          for (int j = 0; j < dc; ++j)
            for (int jp = 0; jp < dc; ++jp) g(jp, j) = static_cast<double>(dc) * rho(q * dc + j, p * dc + jp);
          gens.push_back(g);
        }
    }
    return algebra_closure(sa.region, cdims, gens);
  };
  sa.L = images(pair_b(c, n));
  sa.R = images(pair_b(c, n - 1));
  if (sa.L.dim() * sa.R.dim() != dc * dc)
    throw Error(ErrorCode::FactorizationFailure, "support algebra dimensions " + std::to_string(sa.L.dim()) + " x " +
                                                     std::to_string(sa.R.dim()) + " do not match " +
                                                     std::to_string(dc * dc));
  const auto le = sa.L.elements(), re = sa.R.elements();
  double comm = 0.0;
  for (const Mat& l : le)
    for (const Mat& r : re) comm = std::max(comm, op_norm(l * r - r * l));
  if (comm > 1e-8) throw Error(ErrorCode::FactorizationFailure, "support algebras do not commute");
  return sa;
}

DimensionIndex index_dimension(const Automorphism& a) {
  DimensionIndex out;
  const ChainSpec& c0 = a.chain();
  if (c0.boundary == Boundary::Open) {
    out.value = round_index(0.0, c0.primes());
    out.warnings.push_back("open chain: the index is zero for every QCA");
    return out;
  }
  const Automorphism nn = nearest_neighbor_form(a);
  out.block = nn.block() / a.block();
  const ChainSpec& c = nn.chain();
  const int pairs = c.num_sites / 2;
  if (c.num_sites < 8)
    out.warnings.push_back("ring of " + std::to_string(c.num_sites) +
                           " blocked sites: windowed surrogate for the ring index");
  for (int n = 0; n < pairs; ++n) {
    const SupportAlgebras sa = support_algebras(nn, n);
    const double d2n = c.local_dims[c.wrap(2 * n)];
    out.per_block.push_back(0.5 * (std::log(static_cast<double>(sa.L.dim())) - 2.0 * std::log(d2n)));
  }
  const auto [lo, hi] = std::minmax_element(out.per_block.begin(), out.per_block.end());
  out.spread = *hi - *lo;
  if (out.spread > 1e-9) throw Error(ErrorCode::NumericalFailure, "index depends on the block position");
  out.value = round_index(out.per_block.front(), c.primes());
  return out;
}

Decomposition decompose_index_zero(const Automorphism& a) {
  const Automorphism nn = nearest_neighbor_form(a);
  const ChainSpec& c = nn.chain();
  if (c.boundary != Boundary::Periodic) throw Error(ErrorCode::OpenChainUnsupported, "decomposition needs a ring");
  const int pairs = c.num_sites / 2;
  std::vector<SupportAlgebras> sas;
  for (int n = 0; n < pairs; ++n) sas.push_back(support_algebras(nn, n));
  {
    const double d0 = c.local_dims[0];
    const double raw = 0.5 * (std::log(static_cast<double>(sas[0].L.dim())) - 2.0 * std::log(d0));
    const IndexValue iv = round_index(raw, c.primes());
    if (std::abs(iv.rounded) > 1e-9)
      throw Error(ErrorCode::NonzeroIndex, "index " + std::to_string(iv.rounded) + " is not zero");
  }

  Decomposition dec;
  dec.block = nn.block() / a.block();
  std::vector<Mat> v(static_cast<std::size_t>(pairs));
  for (int n = 0; n < pairs; ++n) {
    if (sas[n].L.structure().factors.size() != 1 || sas[n].R.structure().factors.size() != 1)
      throw Error(ErrorCode::FactorizationFailure, "support algebras are not factors");
    v[n] = aligning_unitary(c, n, sas[n].L.structure().factors[0], sas[n].R.structure().factors[0]);
  }

  std::vector<Mat> u(static_cast<std::size_t>(pairs));
  for (int n = 0; n < pairs; ++n) {
    const Region B = pair_b(c, n);
    const Region Cn = pair_c(c, n), Cm = pair_c(c, n + 1);
    const Region W = Cn.unite(Cm);
    const auto bdims = dims_of(c, B);
    const auto wdims = dims_of(c, W);
    const SplitIndex sn(wdims, Cn.positions_in(W)), sm(wdims, Cm.positions_in(W));
    const Mat& vn = v[n];
    const Mat& vm = v[(n + 1) % pairs];
    const LinearMap theta = [&](const Mat& e) {
      ChainOperator img = embed(c, nn.apply(ChainOperator{B, bdims, e}), W);
      kernels::apply_left(img.m, vn, sn);
      kernels::apply_left(img.m, vm, sm);
      kernels::apply_right(img.m, vn.adjoint(), sn);
      kernels::apply_right(img.m, vm.adjoint(), sm);
      return Mat(reduce_to(c, img, B).m);
    };
    u[n] = inner_unitary_of_automorphism(full_factor(static_cast<int>(c.dim_of(B.sites))), theta, 7 + n, 1e-7);
  }

  for (int n = 0; n < pairs; ++n) {
    dec.max_u_dist = std::max(dec.max_u_dist, phase_distance(u[n], Mat::Identity(u[n].rows(), u[n].cols())));
    dec.max_v_dist = std::max(dec.max_v_dist, phase_distance(v[n], Mat::Identity(v[n].rows(), v[n].cols())));
  }
  Automorphism rec = two_layer_map(nn, u, v, nn.locality());
  const Circuit& circ = rec.circuit();
  dec.u_layer = circ.steps[0].gates;
  dec.v_layer = circ.steps[1].gates;
  dec.recomposed = rec;
  for (int s = 0; s < c.num_sites; ++s)
    for (const ChainOperator& x : weyl_basis(c, Region({s}), false))
      dec.residual = std::max(dec.residual, op_distance(c, nn.apply(x), rec.apply(x)));
  if (dec.residual > 1e-7) throw Error(ErrorCode::NumericalFailure, "decomposition does not reproduce the map");
  return dec;
}

Mat aligning_unitary(const ChainSpec& c, int n, const Factor& lf, const Factor& rf) {
  const int left = c.wrap(2 * n - 1), right = c.wrap(2 * n);
  const int da = c.local_dims[left], di = c.local_dims[right];
  if (lf.k != di || rf.k != da) throw Error(ErrorCode::FactorizationFailure, "support factors have the wrong size");
  // M|a, i> = r_a1 l_i1 psi with psi in the range of r_11 l_11
  const Mat p = rf.unit(0, 0) * lf.unit(0, 0);
  Eigen::Index col = 0;
  p.colwise().norm().maxCoeff(&col);
  CVec psi = p.col(col);
  psi.normalize();
  Mat M(da * di, da * di);
  for (int x = 0; x < da; ++x)
    for (int i = 0; i < di; ++i) {
      const Eigen::Index idx = left < right ? x * di + i : i * da + x;
      M.col(idx) = rf.unit(x, 0) * lf.unit(i, 0) * psi;
    }
  if (!is_unitary(M, 1e-8)) throw Error(ErrorCode::NumericalFailure, "aligning unitary is not unitary");
  // (A (x) B) M^dag aligns as well; pick the product closest to the identity.
  const Mat X = M.adjoint();
  const std::vector<int> dims = left < right ? std::vector<int>{da, di} : std::vector<int>{di, da};
  const SplitIndex sl(dims, {left < right ? 0 : 1}), sr(dims, {left < right ? 1 : 0});
  Mat A = Mat::Identity(da, da), B = Mat::Identity(di, di);
  double last = -1.0;
  for (int it = 0; it < 100; ++it) {
    A = polar_unitary(kernels::partial_trace(kernels::embed(B, sr) * X, sl)).adjoint();
    const Mat yb = kernels::partial_trace(kernels::embed(A, sl) * X, sr);
    B = polar_unitary(yb).adjoint();
    const double score = (B * yb).trace().real();
    if (std::abs(score - last) < 1e-13) break;
    last = score;
  }
  return fix_phase(kernels::embed(A, sl) * kernels::embed(B, sr) * X);
}

Automorphism two_layer_map(const Automorphism& nn, const std::vector<Mat>& u, const std::vector<Mat>& v, Locality loc) {
  const ChainSpec& c = nn.chain();
  const int pairs = c.num_sites / 2;
  Circuit circ{nn.base(), {}};
  Step su, sv;
  su.kind = sv.kind = Step::Kind::Layer;
  for (int n = 0; n < pairs; ++n) {
    su.gates.push_back(to_base_gate(nn, pair_b(c, n), u[static_cast<std::size_t>(n)]));
    sv.gates.push_back(to_base_gate(nn, pair_c(c, n), v[static_cast<std::size_t>(n)]));
  }
  circ.steps = {su, sv};
  Automorphism rec = Automorphism::from_circuit(std::move(circ));
  if (nn.block() > 1) rec = rec.blocked(nn.block());
  return rec.with_locality(std::move(loc));
}

BlendResult blend(const Automorphism& q1, const Automorphism& q2, int cut) {
  if (!q1.base().same_geometry(q2.base()) || q1.block() != q2.block())
    throw Error(ErrorCode::SpecMismatch, "blend needs identical chains");
  int r = 0;
  for (const Automorphism* q : {&q1, &q2}) {
    if (q->locality().kind != LocalityKind::ExactRadius)
      throw Error(ErrorCode::InvalidArgument, "blend needs certified radii");
    r = std::max(r, q->locality().radius);
  }
  const Automorphism n1 = nearest_neighbor_form(q1.with_locality(Locality::exact(r)));
  const Automorphism n2 = nearest_neighbor_form(q2.with_locality(Locality::exact(r)));
  const DimensionIndex i1 = index_dimension(n1), i2 = index_dimension(n2);
  if (std::abs(i1.value.rounded - i2.value.rounded) > 1e-9)
    throw Error(ErrorCode::IndexMismatch, "indices differ: " + std::to_string(i1.value.rounded) + " vs " +
                                              std::to_string(i2.value.rounded));
  const ChainSpec& c = n1.chain();
  const std::size_t D = c.total_dim();
  if (D > 1024) throw Error(ErrorCode::DimensionCap, "blend builds a dense unitary; chain too large");
  const int pairs = c.num_sites / 2;
  BlendResult res;
  res.index = i1.value.rounded;
  const int half = std::max(1, pairs / 2);
  res.n0 = c.wrap(cut) / 2;
  res.n_r = (res.n0 + half) % pairs;
  std::vector<char> inside(static_cast<std::size_t>(pairs), 0);
  for (int k = 0; k < half; ++k) inside[(res.n0 + k) % pairs] = 1;

  const Region all = Region::all(c);
  const Region c0 = pair_c(c, res.n0), cr = pair_c(c, res.n_r);
  const SupportAlgebras s1 = support_algebras(n1, res.n0), s2 = support_algebras(n2, res.n0);
  const SupportAlgebras t1 = support_algebras(n1, res.n_r), t2 = support_algebras(n2, res.n_r);
  const Mat u = factor_iso(s2.L.structure().factors.at(0), s1.L.structure().factors.at(0)).unitary_witness;
  const Mat up = factor_iso(t2.R.structure().factors.at(0), t1.R.structure().factors.at(0)).unitary_witness;
  const Mat W = full_matrix(c, ChainOperator{c0, dims_of(c, c0), u}) * full_matrix(c, ChainOperator{cr, dims_of(c, cr), up});

  // gamma(e^{(m)}_{i0}) for every pair m
  std::vector<std::vector<Mat>> g(static_cast<std::size_t>(pairs));
  std::vector<int> dB(static_cast<std::size_t>(pairs));
  for (int m = 0; m < pairs; ++m) {
    const Region B = pair_b(c, m);
    const auto bd = dims_of(c, B);
    dB[m] = static_cast<int>(c.dim_of(B.sites));
    for (int i = 0; i < dB[m]; ++i) {
      Mat e = Mat::Zero(dB[m], dB[m]);
      e(i, 0) = 1.0;
      const ChainOperator x{B, bd, e};
      g[m].push_back(inside[m] ? Mat(W * full_matrix(c, n2.apply(x)) * W.adjoint()) : full_matrix(c, n1.apply(x)));
    }
  }
  Rng rng(0xb1e);
  CVec psi;
  for (int attempt = 0; attempt < 4; ++attempt) {
    psi = random_complex(static_cast<int>(D), 1, rng);
    for (int m = 0; m < pairs; ++m) psi = g[m][0] * psi;
    if (psi.norm() > 1e-6) break;
  }
  if (!(psi.norm() > 1e-6)) throw Error(ErrorCode::NumericalFailure, "blend reference vector vanished");
  psi.normalize();
  // V|I> = prod_m gamma(e_{i_m 0}) psi, pairs in ascending order
  std::vector<CVec> cols{psi};
  for (int m = 0; m < pairs; ++m) {
    std::vector<CVec> next;
    next.reserve(cols.size() * dB[m]);
    for (const CVec& v0 : cols)
      for (int i = 0; i < dB[m]; ++i) next.push_back(g[m][i] * v0);
    cols.swap(next);
  }
  // the pair containing site 0 is pair 0, so digits are ordered by pair
  Mat V(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  for (std::size_t k = 0; k < cols.size(); ++k) V.col(static_cast<Eigen::Index>(k)) = cols[k];
  if (!is_unitary(V, 1e-8)) throw Error(ErrorCode::NumericalFailure, "blended map is not an automorphism");
  Automorphism gam = Automorphism::from_unitary(n1.base(), V.adjoint());
  if (n1.block() > 1) gam = gam.blocked(n1.block());
  res.gamma = gam.with_locality(Locality::exact(1));

  for (int m = 0; m < pairs; ++m) {
    const bool in = inside[m];
    const bool collar = m == res.n0 || m == (res.n_r + pairs - 1) % pairs;
    if (in && collar) continue;
    if (in) ++res.inner_pairs;
    for (const ChainOperator& x : weyl_basis(c, pair_b(c, m), false)) {
      const double dd = op_distance(c, res.gamma.apply(x), in ? n2.apply(x) : n1.apply(x));
      if (in)
        res.inner_agreement = std::max(res.inner_agreement, dd);
      else
        res.left_agreement = std::max(res.left_agreement, dd);
    }
  }
  return res;
}

std::vector<Gate> random_pair_layer(const ChainSpec& c, int offset, Rng& rng) {
  std::vector<Gate> layer;
  const bool ring = c.boundary == Boundary::Periodic;
  if (ring && c.num_sites % 2 != 0) throw Error(ErrorCode::InvalidArgument, "pair layers need an even ring");
  for (int p = offset; p + 1 < c.num_sites + (ring ? offset : 0); p += 2) {
    const int a = c.wrap(p), b = c.wrap(p + 1);
    std::vector<int> s{std::min(a, b), std::max(a, b)};
    layer.push_back(Gate{s, haar_unitary(static_cast<int>(c.dim_of(s)), rng)});
  }
  return layer;
}

std::vector<Gate> random_site_layer(const ChainSpec& c, Rng& rng) {
  std::vector<Gate> layer;
  for (int s = 0; s < c.num_sites; ++s) layer.push_back(Gate{{s}, haar_unitary(c.local_dims[s], rng)});
  return layer;
}

Automorphism random_two_layer_circuit(const ChainSpec& c, Rng& rng) {
  return circuit_qca(c, {random_pair_layer(c, 0, rng), random_pair_layer(c, 1, rng)});
}

std::vector<RobustnessPoint> robustness_experiment(const Automorphism& q, const std::vector<double>& strengths,
                                                   std::uint64_t seed) {
  const ChainSpec& c = q.chain();
  if (q.block() != 1 || q.locality().kind != LocalityKind::ExactRadius || q.locality().radius > 1)
    throw Error(ErrorCode::InvalidArgument, "robustness experiment needs an unblocked radius-1 QCA");
  Rng rng(seed);
  const IndexValue ref = index_dimension(q).value;
  const Automorphism qb = q.blocked(2).with_locality(Locality::exact(1));
  const SupportAlgebras sref = support_algebras(qb, 0);
  std::vector<RobustnessPoint> out;
  for (double t : strengths) {
    RobustnessPoint pt;
    pt.strength = t;
    // w = prod exp(i t K) on pairs (2k, 2k+1), ||K|| = 1
    std::vector<Gate> layer;
    for (int p = 0; p + 1 < c.num_sites; p += 2) {
      const std::vector<int> s{p, p + 1};
      Mat K = random_hermitian(static_cast<int>(c.dim_of(s)), rng);
      K /= op_norm(K);
      layer.push_back(Gate{s, exp_i_hermitian(K, t)});
    }
    Step st;
    st.kind = Step::Kind::Layer;
    st.gates = layer;
    const Automorphism w = Automorphism::from_circuit(Circuit{c, {st}}, Locality::exact(1));
    const Automorphism ap = compose(w, q);  // x -> w^dag q(x) w
    for (int s = 0; s < c.num_sites; s += 2) {
      const Region X = Region::interval(c, s, 4);
      pt.eps_hat = std::max(pt.eps_hat, restricted_distance(c, q.unitary(), ap.unitary(), X, seed + s, 2, 0).upper);
    }
    try {
      const Automorphism apb = ap.blocked(2).with_locality(Locality::exact(1));
      pt.index = index_dimension(apb).value;
      pt.unchanged = std::abs(pt.index.rounded - ref.rounded) < 1e-9;
      const SupportAlgebras sp = support_algebras(apb, 0);
      const RotateResult rr = rotate_into(sp.L, sref.L.structure().factors.at(0));
      pt.witness_norm = rr.dist_identity;
      pt.witness_ok = rr.dist_identity <= 36.0 * pt.eps_hat + 1e-12 && rr.inclusion_residual <= 1e-8;
    } catch (const Error& e) {
      pt.factorization_ok = false;
      pt.note = e.what();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace qcalab
