#include "qcalab/alpu.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "qcalab/qca.hpp"
#include "qcalab/stability.hpp"

namespace qcalab {

namespace {

// Hermitian unit-norm operators spanning the algebra of an interval.
std::vector<ChainOperator> hermitian_basis(const ChainSpec& c, const Region& X) {
  std::vector<ChainOperator> out;
  for (const ChainOperator& w : weyl_basis(c, X, false)) {
    const Mat re = 0.5 * (w.m + w.m.adjoint());
    const Mat im = cplx(0.0, -0.5) * (w.m - w.m.adjoint());
    for (const Mat* h : {&re, &im}) {
      const double n = op_norm(*h);
      if (n > 1e-12) out.push_back(ChainOperator{X, w.dims, *h / n});
    }
  }
  return out;
}

std::vector<Region> sweep_intervals(const ChainSpec& c, int max_len) {
  std::vector<Region> out;
  for (int len = 1; len <= std::min(max_len, c.num_sites); ++len) {
    const int starts = c.boundary == Boundary::Periodic ? c.num_sites : c.num_sites - len + 1;
    for (int s = 0; s < starts; ++s) out.push_back(Region::interval(c, s, len));
  }
  return out;
}

int region_dist(const ChainSpec& c, const Region& X, int m) {
  int d = c.num_sites;
  for (int x : X.sites) d = std::min(d, c.dist(x, m));
  return d;
}

// Columns S_p of a tensor split: full index sub_off[p] + rest_off[r].
std::vector<Eigen::Index> unit_columns(const SplitIndex& sp, std::size_t p) {
  std::vector<Eigen::Index> idx;
  idx.reserve(sp.rest_dim);
  for (std::size_t r = 0; r < sp.rest_dim; ++r) idx.push_back(static_cast<Eigen::Index>(sp.sub_off[p] + sp.rest_off[r]));
  return idx;
}

// W (|p><q| (x) I) W^dag for every p, q of the subsystem, traced down to
// `onto` (normalized). With W = U^dag this is E_onto alpha(|p><q|).
std::vector<Mat> unit_images(const Mat& W, const std::vector<int>& dims, const std::vector<int>& sub,
                             const std::vector<int>& onto) {
  const SplitIndex sp(dims, sub), so(dims, onto);
  const auto ds = sp.sub_dim;
  std::vector<Mat> cols(ds);
  for (std::size_t p = 0; p < ds; ++p) cols[p] = W(Eigen::all, unit_columns(sp, p));
  std::vector<Mat> out(ds * ds);
  const double norm = 1.0 / static_cast<double>(so.rest_dim);
  for (std::size_t p = 0; p < ds; ++p)
    for (std::size_t q = 0; q < ds; ++q)
      out[p * ds + q] = norm * kernels::partial_trace(cols[p] * cols[q].adjoint(), so);
  return out;
}

}  // namespace

const char* tail_method_name(TailMethod m) {
  return m == TailMethod::RegionDistance ? "region_distance" : "commutator_sup";
}

TailProfile measure_tails(const Automorphism& a, int r_max, TailMethod method, int max_len) {
  const ChainSpec& c = a.chain();
  if (r_max < 0) throw Error(ErrorCode::InvalidArgument, "r_max must be non-negative");
  TailProfile tp;
  tp.method = method;
  if (a.locality().kind == LocalityKind::ExactRadius) tp.certified_radius = a.locality().radius;
  tp.raw.assign(static_cast<std::size_t>(r_max) + 1, 0.0);
  for (int r = 0; r <= r_max; ++r) tp.r.push_back(r);
  const Region all = Region::all(c);
  for (const Region& X : sweep_intervals(c, max_len))
    for (const ChainOperator& x : hermitian_basis(c, X)) {
      const ChainOperator y = a.apply(x);
      if (method == TailMethod::RegionDistance) {
        for (int r = 0; r <= r_max; ++r) {
          const Region ball = X.ball(c, r);
          if (y.support.subset_of(ball)) break;  // zero from here on
          tp.raw[r] = std::max(tp.raw[r], dist_to_region(c, y, ball).eps);
        }
      } else {
        for (int m = 0; m < c.num_sites; ++m) {
          const int dm = region_dist(c, X, m);
          if (dm == 0 || !y.support.contains(m)) continue;
          double sup = 0.0;
          for (const ChainOperator& z : hermitian_basis(c, Region({m}))) sup = std::max(sup, commutator_norm(c, y, z));
          for (int r = 0; r < std::min(dm, r_max + 1); ++r) tp.raw[r] = std::max(tp.raw[r], sup);
        }
      }
    }
  tp.f_hat = tp.raw;
  for (int r = r_max - 1; r >= 0; --r) tp.f_hat[r] = std::max(tp.f_hat[r], tp.f_hat[r + 1]);
  for (double& f : tp.f_hat)
    if (f <= 1e-12) f = 0.0;
  return tp;
}

double lr_tail_formula(const DecayFn& F, int r) {
  if (r < 0) throw Error(ErrorCode::InvalidArgument, "r must be non-negative");
  // chunks [lo, 2 lo) of sum_s (s+1) F(s+r+1)
  double total = 0.0, prev_chunk = -1.0;
  int growing = 0;
  long long lo = 0, len = 16;
  while (true) {
    double chunk = 0.0;
    for (long long s = lo + len - 1; s >= lo; --s) chunk += static_cast<double>(s + 1) * F(static_cast<double>(s + r + 1));
    if (!std::isfinite(chunk)) throw Error(ErrorCode::Divergent, "terms are not finite");
    total += chunk;
    if (4.0 * chunk < 1e-11) break;
    growing = (prev_chunk >= 0 && chunk >= prev_chunk) ? growing + 1 : 0;
    if (growing >= 3 || lo + len > (1LL << 26))
      throw Error(ErrorCode::Divergent, "partial sums do not converge");
    prev_chunk = chunk;
    lo += len;
    len = lo;
  }
  return 4.0 * total;
}

ReproducingReport reproducing_check(const DecayFn& F, const ChainSpec& c, std::optional<double> power) {
  ReproducingReport rep;
  const int N = c.num_sites;
  auto dist = [&](const ChainSpec& cc, int x, int y) { return static_cast<double>(cc.dist(x, y)); };
  int smax = 0;
  for (int m = 0; m < N; ++m) smax = std::max(smax, c.dist(0, m));
  rep.ratio.assign(static_cast<std::size_t>(smax) + 1, 0.0);
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < N; ++m) {
      const int s = c.dist(n, m);
      const double fs = F(s);
      if (!(fs > 0)) continue;
      double conv = 0.0;
      for (int l = 0; l < N; ++l) conv += F(dist(c, n, l)) * F(dist(c, l, m));
      rep.ratio[s] = std::max(rep.ratio[s], conv / fs);
    }
  rep.C = *std::max_element(rep.ratio.begin(), rep.ratio.end());
  for (int s = 2; s <= smax; ++s)
    if (rep.ratio[s] >= 1.5 * rep.ratio[s / 2]) {
      rep.failure_separation = s;
      break;
    }
  rep.first_ok = rep.failure_separation < 0;

  auto row_sum = [&](const ChainSpec& cc) {
    double best = 0.0;
    for (int n = 0; n < cc.num_sites; ++n) {
      double s = 0.0;
      for (int m = 0; m < cc.num_sites; ++m) s += F(dist(cc, n, m));
      best = std::max(best, s);
    }
    return best;
  };
  ChainSpec twice = c;
  twice.num_sites = 2 * N;
  twice.local_dims.assign(static_cast<std::size_t>(2 * N), c.local_dims.empty() ? 2 : c.local_dims[0]);
  rep.row_sum = row_sum(c);
  rep.row_sum_growth = row_sum(twice) / rep.row_sum - 1.0;
  rep.uniform_ok = rep.row_sum_growth <= 0.05;
  rep.reproducing = rep.first_ok && rep.uniform_ok;
  rep.expected = power.has_value() && *power > 1.0;
  return rep;
}

RMat single_site_commutators(const Automorphism& a) {
  const ChainSpec& c = a.chain();
  const int N = c.num_sites;
  RMat G = RMat::Zero(N, N);
  std::vector<std::vector<ChainOperator>> bases;
  for (int m = 0; m < N; ++m) bases.push_back(hermitian_basis(c, Region({m})));
  for (int n = 0; n < N; ++n)
    for (const ChainOperator& x : bases[n]) {
      const ChainOperator y = a.apply(x);
      for (int m = 0; m < N; ++m) {
        if (!y.support.contains(m)) continue;
        for (const ChainOperator& z : bases[m]) G(n, m) = std::max(G(n, m), commutator_norm(c, y, z));
      }
    }
  return G;
}

SetBoundReport single_site_to_sets(const Automorphism& a, const RMat& G, int samples, std::uint64_t seed) {
  const ChainSpec& c = a.chain();
  const int N = c.num_sites;
  if (G.rows() != N || G.cols() != N) throw Error(ErrorCode::InvalidArgument, "G must be N x N");
  Rng rng(seed);
  SetBoundReport rep;
  auto pick = [&]() {
    const int len = std::uniform_int_distribution<int>(1, 2)(rng);
    const int st = std::uniform_int_distribution<int>(0, c.boundary == Boundary::Periodic ? N - 1 : N - len)(rng);
    return Region::interval(c, st, len);
  };
  for (int k = 0; k < samples; ++k) {
    const Region X = pick(), Y = pick();
    const ChainOperator x{X, dims_of(c, X), haar_unitary(static_cast<int>(c.dim_of(X.sites)), rng)};
    const ChainOperator y{Y, dims_of(c, Y), haar_unitary(static_cast<int>(c.dim_of(Y.sites)), rng)};
    const double lhs = commutator_norm(c, a.apply(x), y);
    double g = 0.0;
    for (int n : X.sites)
      for (int m : Y.sites) g += G(n, m);
    const double rhs = 128.0 * g;
    ++rep.samples;
    rep.max_lhs = std::max(rep.max_lhs, lhs);
    if (rhs > 0) rep.max_ratio = std::max(rep.max_ratio, lhs / rhs);
    if (lhs > rhs + 1e-10) ++rep.violations;
  }
  return rep;
}

// ---- localization -----------------------------------------------------------

namespace {

OperatorAlgebra image_algebra(const ChainSpec& c, const Mat& W, const Region& X) {
  // columns vec(W x W^dag) / sqrt(D) for the HS-orthonormal Weyl basis of X
  const Region all = Region::all(c);
  const auto basis = weyl_basis(c, X, true);
  const auto D = static_cast<Eigen::Index>(c.total_dim());
  Mat cols(D * D, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const Mat y = W * embed(c, basis[k], all).m * W.adjoint();
    cols.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const CVec>(y.data(), D * D) / std::sqrt(static_cast<double>(D));
  }
  return OperatorAlgebra(all, c.local_dims, cols);
}

}  // namespace

LocalizeReport localize_patch(const Automorphism& a, int n, int max_sweeps) {
  const ChainSpec& c = a.chain();
  if (c.boundary != Boundary::Periodic || c.num_sites % 2 != 0 || c.num_sites < 4)
    throw Error(ErrorCode::InvalidArgument, "patch localization needs an even ring of at least four sites");
  Mat U = a.unitary();
  const Mat U0 = U;
  struct Incl {
    bool forward;
    Region src, dst;
  };
  std::vector<Incl> incl;
  for (int m = n; m <= n + 2; ++m) incl.push_back({true, pair_b(c, m), pair_c(c, m).unite(pair_c(c, m + 1))});
  for (int m = n + 1; m <= n + 2; ++m) incl.push_back({false, pair_c(c, m), pair_b(c, m - 1).unite(pair_b(c, m))});

  // forward: alpha(x) = U^dag x U; inverse: U x U^dag
  auto algebra_of = [&](const Incl& in) {
    return in.forward ? image_algebra(c, U.adjoint(), in.src) : image_algebra(c, U, in.src);
  };
  auto residuals = [&]() {
    double r = 0.0;
    for (const Incl& in : incl) r = std::max(r, near_inclusion_eps(c, algebra_of(in), in.dst));
    return r;
  };

  LocalizeReport rep;
  rep.eps_initial = residuals();
  if (rep.eps_initial > 1.0 / 64.0)
    throw Error(ErrorCode::EpsilonTooLarge, "patch inclusions are off by " + std::to_string(rep.eps_initial));
  rep.final_residual = rep.eps_initial;
  for (int sweep = 0; sweep < max_sweeps && rep.final_residual > 1e-8; ++sweep) {
    ++rep.sweeps;
    for (const Incl& in : incl) {
      const OperatorAlgebra A = algebra_of(in);
      if (near_inclusion_eps(c, A, in.dst) <= 1e-12) continue;
      const RotateResult rr = rotate_into(c, A, in.dst);
      rep.step_norms.push_back(rr.dist_identity);
      U = in.forward ? Mat(U * rr.u) : Mat(rr.u.adjoint() * U);
    }
    rep.final_residual = residuals();
  }
  rep.converged = rep.final_residual <= 1e-8;
  rep.distance = conjugation_distance(U0, U);
  rep.result = Automorphism::from_unitary(c, U);
  return rep;
}

// ---- approximation ----------------------------------------------------------

namespace {

std::vector<int> positions_of(const Region& r) { return r.sites; }

// Rounds an approximate factor (spanned by `span`) to exact matrix units.
Factor round_factor(const std::vector<Mat>& span, int l, Rng& rng) {
  const int d = static_cast<int>(span.front().rows());
  if (d % l != 0) throw Error(ErrorCode::FactorizationFailure, "factor size does not divide the dimension");
  const int m = d / l;
  auto combo = [&]() {
    Mat x = Mat::Zero(d, d);
    std::normal_distribution<double> nd;
    for (const Mat& s : span) x += cplx(nd(rng), nd(rng)) * s;
    return x;
  };
  for (int attempt = 0; attempt < 6; ++attempt) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(combo()));
    const RVec& ev = es.eigenvalues();
    double inner = 0.0, gap = 1e300;
    for (int g = 0; g < l; ++g) {
      inner = std::max(inner, ev(g * m + m - 1) - ev(g * m));
      if (g + 1 < l) gap = std::min(gap, ev(g * m + m) - ev(g * m + m - 1));
    }
    if (l > 1 && gap < 10.0 * inner) continue;
    std::vector<Mat> q(static_cast<std::size_t>(l));
    for (int g = 0; g < l; ++g) {
      const Mat v = es.eigenvectors().middleCols(g * m, m);
      q[g] = v * v.adjoint();
    }
    const Mat ar = combo();
    Factor f;
    f.k = l;
    f.m = m;
    f.projection = Mat::Identity(d, d);
    std::vector<Mat> e1(static_cast<std::size_t>(l));
    e1[0] = q[0];
    bool ok = true;
    for (int i = 1; i < l && ok; ++i) {
      Eigen::BDCSVD<Mat> svd(q[i] * ar * q[0], Eigen::ComputeFullU | Eigen::ComputeFullV);
      if (svd.singularValues()(m - 1) < 1e-6) ok = false;
      e1[i] = svd.matrixU().leftCols(m) * svd.matrixV().leftCols(m).adjoint();
    }
    if (!ok) continue;
    f.units.resize(static_cast<std::size_t>(l * l));
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) f.units[i * l + j] = e1[i] * e1[j].adjoint();
    return f;
  }
  throw Error(ErrorCode::FactorizationFailure, "approximate support algebra has no clean block structure");
}

}  // namespace

ApproxResult qca_approximate(const Automorphism& a, int j, std::uint64_t seed) {
  if (a.block() != 1) throw Error(ErrorCode::InvalidArgument, "approximation expects an unblocked map");
  const ChainSpec& base = a.chain();
  if (base.boundary != Boundary::Periodic) throw Error(ErrorCode::OpenChainUnsupported, "approximation needs a ring");
  if (j < 1 || base.num_sites % j != 0) throw Error(ErrorCode::InvalidArgument, "blocking must divide the ring");
  const int Nb = base.num_sites / j;
  ApproxResult res;
  res.j = j;
  const int w = std::min(3, (base.num_sites - 1) / 2);
  if (Nb == 2) {
    // two blocked sites cover the ring; the map is its own radius-2 QCA
    res.beta = a;
    res.lower.assign(2, 0.0);
    res.upper.assign(2, 0.0);
    res.note = "blocked ring has two sites; beta = alpha";
    res.index = index_mi(a, base.num_sites / 2, w).value;
    return res;
  }
  if (Nb % 2 != 0 || Nb < 4) throw Error(ErrorCode::InvalidArgument, "blocked ring needs an even number >= 4 of sites");
  const Automorphism ab = j > 1 ? a.blocked(j) : a;
  const ChainSpec& c = ab.chain();
  const Mat& U = a.unitary();
  const std::vector<int>& dims = base.local_dims;
  const int pairs = Nb / 2;
  Rng rng(seed);

  std::vector<Factor> Lf(static_cast<std::size_t>(pairs)), Rf(static_cast<std::size_t>(pairs));
  res.gram_gap = 1.0;
  for (int n = 0; n < pairs; ++n) {
    const Region Cb = ab.to_base(pair_c(c, n)), Bb = ab.to_base(pair_b(c, n));
    const int dC = static_cast<int>(base.dim_of(Cb.sites));
    const int dB = static_cast<int>(base.dim_of(Bb.sites));
    // T(x) = E_B alpha^-1(x) on the matrix units of C (W = U)
    const std::vector<Mat> y = unit_images(U, dims, positions_of(Cb), positions_of(Bb));
    Mat Y(static_cast<Eigen::Index>(dB) * dB, static_cast<Eigen::Index>(dC) * dC);
    const double scale = std::sqrt(static_cast<double>(dC) / dB);
    for (std::size_t k = 0; k < y.size(); ++k)
      Y.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const CVec>(y[k].data(), dB * dB) * scale;
    Eigen::SelfAdjointEigenSolver<Mat> es(Y.adjoint() * Y);
    std::vector<Mat> span;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      const double lam = es.eigenvalues()(k);
      res.gram_gap = std::min(res.gram_gap, std::abs(lam - 0.5));
      if (lam <= 0.5) continue;
      Mat s(dC, dC);
      for (int p = 0; p < dC; ++p)
        for (int q = 0; q < dC; ++q) s(p, q) = es.eigenvectors()(p * dC + q, k);
      span.push_back(s);
    }
    const int l = static_cast<int>(std::lround(std::sqrt(static_cast<double>(span.size()))));
    if (l * l != static_cast<int>(span.size()))
      throw Error(ErrorCode::FactorizationFailure, "approximate support algebra has dimension " +
                                                       std::to_string(span.size()) + ", not a square");
    const int d_right = static_cast<int>(c.local_dims[c.wrap(2 * n)]);
    if (l != d_right)
      throw Error(ErrorCode::NonzeroIndex, "approximate support algebra has size " + std::to_string(l) +
                                               "; only index-zero maps are approximated");
    Lf[n] = round_factor(span, l, rng);
    Rf[n] = commutant_factor(Lf[n]);
  }

  std::vector<Mat> v(static_cast<std::size_t>(pairs)), u(static_cast<std::size_t>(pairs));
  for (int n = 0; n < pairs; ++n) v[n] = aligning_unitary(c, n, Lf[n], Rf[n]);
  // U~ = U V^dag, so that V alpha(b) V^dag = U~^dag b U~
  Mat Vfull = Mat::Identity(U.rows(), U.cols());
  for (int n = 0; n < pairs; ++n) {
    const Region Cb = ab.to_base(pair_c(c, n));
    kernels::apply_left(Vfull, v[n], SplitIndex(dims, positions_of(Cb)));
  }
  const Mat Ut = U * Vfull.adjoint();
  for (int n = 0; n < pairs; ++n) {
    const Region Bb = ab.to_base(pair_b(c, n));
    const int dB = static_cast<int>(base.dim_of(Bb.sites));
    const std::vector<Mat> th = unit_images(Ut.adjoint(), dims, positions_of(Bb), positions_of(Bb));
    const Factor full = full_factor(dB);
    const LinearMap theta = [&](const Mat& e) {
      Mat out = Mat::Zero(dB, dB);
      for (int p = 0; p < dB; ++p)
        for (int q = 0; q < dB; ++q) out += e(p, q) * th[static_cast<std::size_t>(p * dB + q)];
      return out;
    };
    u[n] = intertwiner_polar(full, theta, seed + static_cast<std::uint64_t>(n));
  }

  res.beta = two_layer_map(ab, u, v, Locality::exact(2));
  const Mat Ub = res.beta.unitary();
  for (int s = 0; s < Nb; ++s) {
    const RestrictedDistance rd = restricted_distance(base, U, Ub, ab.to_base(Region({s})), seed + 100 + s);
    res.lower.push_back(rd.lower);
    res.upper.push_back(rd.upper);
  }
  res.dist_lower = *std::max_element(res.lower.begin(), res.lower.end());
  res.dist_upper = *std::max_element(res.upper.begin(), res.upper.end());
  const Automorphism beta_base = Automorphism::from_circuit(res.beta.circuit());
  res.index = index_mi(beta_base, base.num_sites / 2, w).value;
  return res;
}

ApproxSweep approximation_sweep(const Automorphism& a, const std::vector<int>& js, std::uint64_t seed) {
  ApproxSweep sw;
  for (int j : js) sw.rows.push_back(qca_approximate(a, j, seed));
  sw.decreasing = true;
  for (std::size_t k = 1; k < sw.rows.size(); ++k)
    if (!(sw.rows[k].dist_upper < sw.rows[k - 1].dist_upper)) sw.decreasing = false;
  // rounded index constant over every row with distance below 1/384
  sw.stabilized = false;
  for (const ApproxResult& r : sw.rows) {
    if (r.dist_upper > 1.0 / 384.0) continue;
    if (!sw.stabilized) {
      sw.stabilized = true;
      sw.stabilized_index = r.index.rounded;
    } else if (std::abs(r.index.rounded - sw.stabilized_index) > 1e-9) {
      sw.stabilized = false;
      break;
    }
  }
  return sw;
}

// ---- synthesis --------------------------------------------------------------

Synthesis synthesize_hamiltonian(const Automorphism& q, std::uint64_t seed) {
  const Decomposition dec = decompose_index_zero(q);
  const ChainSpec& base = q.base();
  Synthesis out;
  out.model.chain = base;
  Rng rng(seed);
  // the V layer acts first in time, then the U layer; each runs for 1/2
  const std::vector<const std::vector<Gate>*> layers{&dec.v_layer, &dec.u_layer};
  std::vector<Segment> segs(2);
  for (int sidx = 0; sidx < 2; ++sidx) {
    segs[sidx].duration = 0.5;
    for (const Gate& g : *layers[sidx]) {
      Mat lg;
      try {
        lg = log_unitary(g.u, 1e-6);
      } catch (const Error&) {
        ++out.phase_retries;
        const double phi = std::uniform_real_distribution<double>(0.0, 2.0 * M_PI)(rng);
        lg = log_unitary(g.u * std::polar(1.0, phi), 1e-6);  // throws LogBranchFailure again
      }
      Mat h = cplx(0.0, 2.0) * lg;
      h = hermitian_part(h);
      const double nrm = op_norm(h);
      if (nrm <= 1e-12) continue;
      Term t{ChainOperator{Region(g.sites, true), dims_of(base, Region(g.sites)), h}};
      int diam = 0;
      for (int x : g.sites)
        for (int y : g.sites) diam = std::max(diam, base.dist(x, y));
      out.terms.push_back({sidx + 1, diam, nrm});
      segs[sidx].terms.push_back(static_cast<int>(out.model.terms.size()));
      out.model.terms.push_back(std::move(t));
    }
  }
  if (!out.model.terms.empty()) out.model.schedule = segs;
  Automorphism back = evolve(out.model, 1.0);
  if (q.block() > 1) back = back.blocked(q.block());
  const ChainSpec& c = q.chain();
  for (int s = 0; s < c.num_sites; ++s)
    for (const ChainOperator& x : weyl_basis(c, Region({s}), false))
      out.residual = std::max(out.residual, op_distance(c, q.apply(x), back.apply(x)));
  if (out.residual > 1e-6) throw Error(ErrorCode::NumericalFailure, "synthesized schedule misses the target");
  return out;
}

}  // namespace qcalab
