#include "qcalab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qcalab {

namespace {

// Linear extension of a map given on matrix units of the listed factors.
LinearMap extend_from_units(const std::vector<Factor>& fs, const std::vector<std::vector<Mat>>& images) {
  return [fs, images](const Mat& x) {
    Mat out = Mat::Zero(images.front().front().rows(), images.front().front().cols());
    for (std::size_t b = 0; b < fs.size(); ++b) {
      const Factor& f = fs[b];
      const double tr = std::abs(f.unit(0, 0).trace());
      for (int i = 0; i < f.k; ++i)
        for (int j = 0; j < f.k; ++j) {
          const cplx c = (f.unit(j, i) * x).trace() / tr;
          if (std::abs(c) > 0) out += c * images[b][static_cast<std::size_t>(i * f.k + j)];
        }
    }
    return out;
  };
}

Mat ptrace_frame(const Mat& y, int k, int m) {
  Mat out = Mat::Zero(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int s = 0; s < m; ++s) out(i, j) += y(i * m + s, j * m + s);
  return out / static_cast<double>(m);
}

Mat inv_sqrt_psd(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
  RVec ev = es.eigenvalues();
  for (int k = 0; k < ev.size(); ++k) {
    if (ev(k) <= 1e-14) throw Error(ErrorCode::SingularY, "compression is singular");
    ev(k) = 1.0 / std::sqrt(ev(k));
  }
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double NearHomomorphism::eps() const { return std::accumulate(gammas.begin(), gammas.end(), 0.0); }

NearHomomorphism NearHomomorphism::make(std::vector<OperatorAlgebra> sources, std::vector<LinearMap> maps,
                                        std::uint64_t seed, double tol) {
  if (sources.size() != maps.size() || sources.empty())
    throw Error(ErrorCode::InvalidArgument, "need one map per source");
  NearHomomorphism h;
  Rng rng(seed);
  const int d = sources.front().ambient();
  const Mat I = Mat::Identity(d, d);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto& alg = sources[s];
    if (alg.ambient() != d) throw Error(ErrorCode::RegionMismatch, "sources must share an ambient");
    const auto& phi = maps[s];
    if (op_norm(phi(I) - I) > tol) throw Error(ErrorCode::NotAnAutomorphism, "map is not unital");
    const auto& fs = alg.structure().factors;
    std::vector<Mat> first;
    for (const Factor& f : fs) {
      std::vector<Mat> t(static_cast<std::size_t>(f.k * f.k));
      for (int i = 0; i < f.k; ++i)
        for (int j = 0; j < f.k; ++j) t[i * f.k + j] = phi(f.unit(i, j));
      auto T = [&](int i, int j) -> const Mat& { return t[static_cast<std::size_t>(i * f.k + j)]; };
      double r = op_norm(T(0, 0) * T(0, 0) - T(0, 0));
      for (int i = 0; i < f.k; ++i)
        for (int j = 0; j < f.k; ++j) {
          r = std::max(r, op_norm(T(i, 0) * T(0, j) - T(i, j)));
          r = std::max(r, op_norm(T(i, j).adjoint() - T(j, i)));
        }
      for (int i = 0; i < f.k; ++i) r = std::max(r, op_norm(T(0, i) * T(i, 0) - T(0, 0)));
      for (const Mat& p : first) r = std::max(r, op_norm(p * T(0, 0)));
      first.push_back(T(0, 0));
      if (r > tol) throw Error(ErrorCode::NotAnAutomorphism, "map is not *-multiplicative (residual " + std::to_string(r) + ")");
    }
    for (std::size_t o = 0; o < s; ++o) {
      const auto& fo = sources[o].structure().factors;
      for (const Factor& a : fs)
        for (const Factor& b : fo)
          for (int i = 0; i < a.k; ++i)
            for (int j = 0; j < b.k; ++j) {
              const Mat& x = a.unit(i, 0);
              const Mat& y = b.unit(0, j);
              if (op_norm(x * y - y * x) > tol) throw Error(ErrorCode::InvalidArgument, "sources do not commute");
            }
    }
    double g = 0.0;
    auto probe = [&](const Mat& a) {
      const double n = op_norm(a);
      if (n > 0) g = std::max(g, op_norm(phi(a) - a) / n);
    };
    for (const Factor& f : fs)
      for (const Mat& e : f.units) probe(e);
    for (int k = 0; k < alg.dim(); ++k) probe(alg.element(k));
    for (int k = 0; k < 16; ++k) probe(alg.random_unitary(rng));
    h.gammas.push_back(g);
  }
  h.sources = std::move(sources);
  h.maps = std::move(maps);
  return h;
}

InnerResult make_inner(const NearHomomorphism& h, double tol) {
  InnerResult res;
  res.eps = h.eps();
  if (res.eps >= 1.0) throw Error(ErrorCode::EpsilonTooLarge, "sum of gammas is " + std::to_string(res.eps));
  const int d = h.sources.front().ambient();
  Mat y = Mat::Identity(d, d);
  for (std::size_t s = 0; s < h.sources.size(); ++s) {
    Mat next = Mat::Zero(d, d);
    for (const Factor& f : h.sources[s].structure().factors) {
      Mat acc = Mat::Zero(d, d);
      for (int i = 0; i < f.k; ++i)
        for (int j = 0; j < f.k; ++j) acc.noalias() += f.unit(i, j) * y * h.maps[s](f.unit(j, i));
      next += acc / static_cast<double>(f.k);
    }
    y.swap(next);
  }
  res.u = polar_unitary(y, &res.smin);
  if (res.smin < 1e-8) throw Error(ErrorCode::SingularY, "|y| is not invertible");
  for (std::size_t s = 0; s < h.sources.size(); ++s) {
    auto check = [&](const Mat& a) {
      res.residual = std::max(res.residual, op_norm(h.maps[s](a) - res.u.adjoint() * a * res.u));
    };
    for (const Factor& f : h.sources[s].structure().factors)
      for (const Mat& e : f.units) check(e);
    for (int k = 0; k < h.sources[s].dim(); ++k) check(h.sources[s].element(k));
  }
  if (res.residual > tol) throw Error(ErrorCode::NumericalFailure, "intertwining residual " + std::to_string(res.residual));
  res.dist_identity = op_norm(Mat::Identity(d, d) - res.u);
  const double e = res.eps;
  res.bound = std::sqrt(2.0) * e / std::sqrt(1.0 + std::sqrt(1.0 - e * e));
  res.bound_ok = res.dist_identity <= res.bound + 1e-12;
  return res;
}

Factor region_factor(const ChainSpec& c, const Region& ambient, const Region& sub) {
  if (!sub.subset_of(ambient)) throw Error(ErrorCode::RegionMismatch, "sub-region outside ambient");
  const auto dims = dims_of(c, ambient);
  const int k = static_cast<int>(c.dim_of(sub.sites));
  const int d = static_cast<int>(c.dim_of(ambient.sites));
  Factor f;
  f.k = k;
  f.m = d / k;
  f.projection = Mat::Identity(d, d);
  SplitIndex sp(dims, sub.positions_in(ambient));
  for (const Mat& e : matrix_units(k)) f.units.push_back(kernels::embed(e, sp));
  return f;
}

RotateResult rotate_into(const ChainSpec& c, const OperatorAlgebra& a, const Region& target, const RotateOptions& opt) {
  return rotate_into(a, region_factor(c, a.region(), target), opt);
}

RotateResult rotate_into(const OperatorAlgebra& a, const Factor& target, const RotateOptions& opt) {
  const int d = a.ambient();
  const int k = target.k, m = target.m;
  if (k * m != d) throw Error(ErrorCode::InvalidArgument, "target factor must span the ambient");
  const OperatorAlgebra B = OperatorAlgebra::from_units(a.region(), a.dims(), {target});
  RotateResult res;
  res.eps_in = near_inclusion_eps(a, B);
  if (res.eps_in > opt.max_eps)
    throw Error(ErrorCode::EpsilonTooLarge, "near inclusion " + std::to_string(res.eps_in) + " exceeds bound");

  const Mat F = target.frame();
  const auto& fs = a.structure().factors;
  std::vector<std::vector<Mat>> rho(fs.size());  // images in M_k, frame coordinates
  std::vector<std::vector<Mat>> X(fs.size());    // near images of e_i0

  const std::size_t K = static_cast<std::size_t>(k) * m * m;
  if (!opt.force_lifting && K <= opt.dilation_cap) {
    res.dilation = true;
    // K' = C^k (x) C^m (x) C^m', V|i> = |i>|Omega>, pi(x) = x (x) I
    const Eigen::Index KK = static_cast<Eigen::Index>(K);
    Mat V = Mat::Zero(KK, k);
    const double s = 1.0 / std::sqrt(static_cast<double>(m));
    for (int i = 0; i < k; ++i)
      for (int t = 0; t < m; ++t) V(static_cast<Eigen::Index>(i) * m * m + t * m + t, i) = s;
    // (x (x) I_m) M for x in frame coordinates; a column of M reshapes to
    // an m x d matrix (s', x) since s' is the fastest index
    auto pi_apply = [&](const Mat& x, const Mat& M) {
      Mat out(KK, M.cols());
      for (Eigen::Index col = 0; col < M.cols(); ++col) {
        Eigen::Map<const Mat> vin(M.col(col).data(), m, d);
        Mat r = vin * x.transpose();
        out.col(col) = Eigen::Map<const CVec>(r.data(), KK);
      }
      return out;
    };
    int ncols = 0;
    for (const Factor& f : fs) ncols += f.k * f.k * k;
    Mat Z(KK, ncols);
    int col = 0;
    for (const Factor& f : fs)
      for (const Mat& e : f.units) {
        Z.middleCols(col, k) = pi_apply(F.adjoint() * e * F, V) / std::sqrt(static_cast<double>(f.k));
        col += k;
      }
    // p~ = Z Z^dag; its nonzero spectrum is the squared singular values of Z
    Eigen::BDCSVD<Mat> svd(Z, Eigen::ComputeThinU);
    const RVec sv2 = svd.singularValues().cwiseAbs2();
    const double delta = std::min(0.49, 8.0 * res.eps_in + 1e-9);
    int rank = 0;
    for (int t = 0; t < sv2.size(); ++t) {
      const double lam = sv2(t);
      if (lam > 0.5) ++rank;
      const double off = std::min(std::abs(lam), std::abs(1.0 - lam));
      res.spectral_spread = std::max(res.spectral_spread, off);
      if (off > delta) throw Error(ErrorCode::SpectralGapFailure, "projection spectrum does not split");
    }
    if (rank != k) throw Error(ErrorCode::SpectralGapFailure, "rank of the twirled projection changed");
    const Mat Uq = svd.matrixU().leftCols(rank);
    const Mat qV = Uq * (Uq.adjoint() * V);
    const Mat Wv = qV * inv_sqrt_psd(V.adjoint() * qV);  // w V
    for (std::size_t b = 0; b < fs.size(); ++b)
      for (int i = 0; i < fs[b].k; ++i) X[b].push_back(Wv.adjoint() * pi_apply(F.adjoint() * fs[b].unit(i, 0) * F, Wv));
  } else {
    // approximate matrix units of E_B restricted to a
    for (std::size_t b = 0; b < fs.size(); ++b)
      for (int i = 0; i < fs[b].k; ++i) X[b].push_back(ptrace_frame(F.adjoint() * fs[b].unit(i, 0) * F, k, m));
  }
  {
    // both routes give near matrix units; lift them to exact ones
    std::vector<std::vector<Mat>> V(fs.size());
    int total = 0;
    for (std::size_t b = 0; b < fs.size(); ++b) {
      const double tr = std::abs(fs[b].unit(0, 0).trace()) / m;
      const int r = static_cast<int>(std::lround(tr));
      if (std::abs(tr - r) > 1e-6 || r < 1) throw Error(ErrorCode::SpectralGapFailure, "block rank not divisible");
      Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(X[b][0]));
      V[b].push_back(es.eigenvectors().rightCols(r));
      for (int i = 1; i < fs[b].k; ++i) V[b].push_back(X[b][i] * V[b][0]);
      total += fs[b].k * r;
    }
    if (total != k) throw Error(ErrorCode::SpectralGapFailure, "lifted units are not unital");
    Mat W(k, total);
    int col = 0;
    for (auto& vb : V)
      for (Mat& v : vb) {
        W.middleCols(col, v.cols()) = v;
        col += static_cast<int>(v.cols());
      }
    const Mat Wu = polar_unitary(W);
    col = 0;
    for (auto& vb : V)
      for (Mat& v : vb) {
        v = Wu.middleCols(col, v.cols());
        col += static_cast<int>(v.cols());
      }
    for (std::size_t b = 0; b < fs.size(); ++b)
      for (int i = 0; i < fs[b].k; ++i)
        for (int j = 0; j < fs[b].k; ++j) rho[b].push_back(V[b][i] * V[b][j].adjoint());
  }

  // back to ambient coordinates: Phi(e) = F (rho(e) (x) I_m) F^dag
  const Mat Im = Mat::Identity(m, m);
  std::vector<std::vector<Mat>> images(fs.size());
  for (std::size_t b = 0; b < fs.size(); ++b)
    for (const Mat& r : rho[b]) images[b].push_back(F * kron(r, Im) * F.adjoint());
  const LinearMap phi = extend_from_units(fs, images);
  const NearHomomorphism h = NearHomomorphism::make({a}, {phi}, 17, 1e-8);
  const InnerResult inner = make_inner(h, 1e-8);
  res.u = inner.u;
  res.dist_identity = inner.dist_identity;
  for (int t = 0; t < a.dim(); ++t) {
    const Mat r = res.u.adjoint() * a.element(t) * res.u;
    res.inclusion_residual = std::max(res.inclusion_residual, B.residual(r));
  }
  res.bound_ok = res.dist_identity <= 12.0 * res.eps_in + 1e-12;
  return res;
}

double commutator_delta(const Mat& z, const std::vector<Mat>& cs) {
  const double nz = op_norm(z);
  double best = 0.0;
  if (!(nz > 0)) return 0.0;
  for (const Mat& c : cs) {
    const double nc = op_norm(c);
    if (nc > 0) best = std::max(best, op_norm(z * c - c * z) / (nz * nc));
  }
  return best;
}

std::pair<cplx, double> enclosing_circle(std::vector<cplx> pts) {
  if (pts.empty()) return {cplx(0), 0.0};
  std::mt19937_64 rng(1);
  std::shuffle(pts.begin(), pts.end(), rng);
  auto outside = [](const cplx& p, const cplx& c, double r) { return std::abs(p - c) > r * (1 + 1e-12) + 1e-15; };
  auto two = [](const cplx& a, const cplx& b) { return std::make_pair((a + b) / 2.0, std::abs(a - b) / 2.0); };
  auto three = [&](const cplx& a, const cplx& b, const cplx& c) {
    const double ax = a.real(), ay = a.imag(), bx = b.real(), by = b.imag(), cx = c.real(), cy = c.imag();
    const double den = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    if (std::abs(den) < 1e-18) {
      // collinear: the widest pair decides
      auto best = two(a, b);
      for (auto cand : {two(a, c), two(b, c)})
        if (cand.second > best.second) best = cand;
      return best;
    }
    const double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    const cplx ctr((a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / den,
                   (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / den);
    return std::make_pair(ctr, std::abs(a - ctr));
  };
  cplx c = pts[0];
  double r = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!outside(pts[i], c, r)) continue;
    c = pts[i];
    r = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      if (!outside(pts[j], c, r)) continue;
      std::tie(c, r) = two(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k)
        if (outside(pts[k], c, r)) std::tie(c, r) = three(pts[i], pts[j], pts[k]);
    }
  }
  return {c, r};
}

double conjugation_distance(const Mat& u, const Mat& v) {
  if (u.rows() != v.rows()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  CVec ev;
  Mat vecs;
  normal_eig(v * u.adjoint(), ev, vecs);
  std::vector<cplx> pts(ev.data(), ev.data() + ev.size());
  return 2.0 * enclosing_circle(std::move(pts)).second;
}

RestrictedDistance restricted_distance(const ChainSpec& c, const Mat& u1, const Mat& u2, const Region& X,
                                       std::uint64_t seed, int probes, int ascent) {
  const Region all = Region::all(c);
  const Mat W = u1 * u2.adjoint();
  RestrictedDistance rd;
  const Region rest = X.complement(c);
  const ChainOperator Wop{all, c.local_dims, W};
  const Mat Wc = conditional_expectation(c, Wop, rest).m;
  rd.upper = std::min(2.0 * op_norm(W - Wc), conjugation_distance(u1, u2));

  const auto dims = c.local_dims;
  const SplitIndex sp(dims, X.sites);
  const int dx = static_cast<int>(sp.sub_dim);
  auto comm = [&](const Mat& x) {
    Mat a = W, b = W;
    kernels::apply_left(a, x, sp);
    kernels::apply_right(b, x, sp);
    return Mat(a - b);
  };
  Rng rng(seed);
  Mat best_x = Mat::Identity(dx, dx);
  double best = 0.0;
  for (int p = 0; p < probes; ++p) {
    const Mat x = (p % 2 == 0) ? haar_unitary(dx, rng) : [&] {
      Mat h = random_hermitian(dx, rng);
      return Mat(h / op_norm(h));
    }();
    const double v = op_norm(comm(x));
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  // ascent: follow the top singular pair of [x, W]
  Mat x = best_x;
  for (int it = 0; it < ascent; ++it) {
    const Mat C = comm(x);
    Eigen::BDCSVD<Mat> svd(C, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const CVec psi = svd.matrixU().col(0), phi = svd.matrixV().col(0);
    // d/dx Re <psi|[x, W]|phi> = Re tr(x G),  G = W|phi><psi| - |phi><psi|W
    const Mat G = W * phi * psi.adjoint() - phi * (psi.adjoint() * W);
    const Mat Gx = kernels::partial_trace(G, sp);
    Eigen::BDCSVD<Mat> sg(Gx, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat xn = sg.matrixV() * sg.matrixU().adjoint();
    const double v = op_norm(comm(xn));
    if (v <= best * (1 + 1e-12)) break;
    best = v;
    x = xn;
  }
  rd.lower = std::min(best, rd.upper);
  return rd;
}

LocalErrorReport homomorphism_local_error_check(const Automorphism& a1, const Automorphism& a2,
                                                const std::vector<Region>& blocks, std::uint64_t seed) {
  const ChainSpec& c = a1.chain();
  if (!c.same_geometry(a2.chain())) throw Error(ErrorCode::SpecMismatch, "chains differ");
  std::vector<int> cover(static_cast<std::size_t>(c.num_sites), 0);
  for (const Region& b : blocks)
    for (int s : b.sites) ++cover[s];
  for (int v : cover)
    if (v != 1) throw Error(ErrorCode::InvalidArgument, "blocks must partition the chain");
  const Mat &u1 = a1.unitary(), &u2 = a2.unitary();
  LocalErrorReport rep;
  std::uint64_t s = seed;
  for (const Region& b : blocks) {
    rep.blocks.push_back(restricted_distance(c, u1, u2, b, s++));
    rep.eps += rep.blocks.back().upper;
  }
  rep.global_lower = restricted_distance(c, u1, u2, Region::all(c), s).lower;
  rep.global_exact = conjugation_distance(u1, u2);
  rep.bound = 2.0 * std::sqrt(2.0) * rep.eps;
  rep.ok = rep.eps >= 1.0 || (rep.global_lower <= rep.bound + 1e-12 && rep.global_exact <= rep.bound + 1e-12);
  return rep;
}

namespace {

Mat random_generator(int d, Rng& rng) {
  Mat k = random_hermitian(d, rng);
  return k / op_norm(k);
}

// Subalgebra M_2 on qubit `q` of three qubits (generators X, Z).
std::vector<Mat> qubit_generators(int q) {
  std::vector<Mat> g;
  for (char p : {'X', 'Z'}) {
    Mat m = Mat::Identity(1, 1);
    for (int s = 0; s < 3; ++s) m = kron(m, s == q ? pauli(p) : Mat(Mat::Identity(2, 2)));
    g.push_back(m);
  }
  return g;
}

}  // namespace

StabilityTrial make_inner_trial(Rng& rng, double eps_max) {
  const Region all({0, 1, 2}, true);
  const std::vector<int> dims{2, 2, 2};
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Mat V = haar_unitary(8, rng);
  // one or two commuting factors in a random frame
  std::vector<OperatorAlgebra> src;
  const int count = 1 + static_cast<int>(U(rng) < 0.5);
  for (int q = 0; q < count; ++q) {
    std::vector<Mat> g = qubit_generators(2 * q);
    for (Mat& m : g) m = V * m * V.adjoint();
    src.push_back(algebra_closure(all, dims, g));
  }
  const Mat K = random_generator(8, rng);
  for (int attempt = 0;; ++attempt) {
    const double t = eps_max * (0.02 + 0.48 * U(rng)) / (attempt + 1);
    const Mat w = exp_i_hermitian(K, t);
    std::vector<LinearMap> maps(src.size(), [w](const Mat& a) { return Mat(w.adjoint() * a * w); });
    const NearHomomorphism h = NearHomomorphism::make(src, maps, 11);
    if (h.eps() > eps_max) continue;
    const InnerResult r = make_inner(h);
    StabilityTrial tr;
    tr.eps = r.eps;
    tr.dist_identity = r.dist_identity;
    tr.residual = r.residual;
    tr.bound = std::sqrt(2.0) * r.eps;
    tr.ok = r.residual <= 1e-8 && r.dist_identity <= tr.bound + 1e-12;
    return tr;
  }
}

StabilityTrial rotate_into_trial(Rng& rng, double eps_max) {
  const ChainSpec c = ChainSpec::uniform(3, 2, Boundary::Open);
  const Region all({0, 1, 2}, true);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  // M_2 on qubit 0, or M_4 on qubits 0 and 1, rotated off by exp(itK)
  std::vector<Mat> g = qubit_generators(0);
  if (U(rng) < 0.5)
    for (const Mat& m : qubit_generators(1)) g.push_back(m);
  const Mat K = random_generator(8, rng);
  for (int attempt = 0;; ++attempt) {
    const double t = eps_max * (0.05 + 0.45 * U(rng)) / (attempt + 1);
    const Mat e = exp_i_hermitian(K, t);
    std::vector<Mat> ge;
    for (const Mat& m : g) ge.push_back(e * m * e.adjoint());
    const OperatorAlgebra A = algebra_closure(all, {2, 2, 2}, ge);
    if (near_inclusion_eps(c, A, Region({0, 1})) > eps_max) continue;
    const RotateResult r = rotate_into(c, A, Region({0, 1}));
    StabilityTrial tr;
    tr.eps = r.eps_in;
    tr.dist_identity = r.dist_identity;
    tr.residual = r.inclusion_residual;
    tr.bound = 12.0 * r.eps_in;
    tr.ok = r.inclusion_residual <= 1e-8 && r.dist_identity <= tr.bound + 1e-12;
    return tr;
  }
}

LemmaSuite commutator_lemma_suite(std::uint64_t seed, int draws) {
  LemmaSuite out;
  out.draws = draws;
  Rng rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<int> Dd(2, 5);
  auto comm = [](const Mat& a, const Mat& b) { return op_norm(a * b - b * a); };
  for (int t = 0; t < draws; ++t) {
    // powers: normal y with spectrum in |1 - lambda| <= eps
    {
      const int d = Dd(rng);
      const double eps = 0.95 * U(rng);
      const double s = 2.0 * U(rng) - 1.0;
      const Mat V = haar_unitary(d, rng);
      CVec lam(d);
      for (int k = 0; k < d; ++k) lam(k) = 1.0 + eps * std::sqrt(U(rng)) * std::polar(1.0, 2 * M_PI * U(rng));
      const Mat y = V * lam.asDiagonal() * V.adjoint();
      CVec lp(d);
      for (int k = 0; k < d; ++k) lp(k) = std::pow(lam(k), s);
      const Mat ys = V * lp.asDiagonal() * V.adjoint();
      const Mat x = random_complex(d, d, rng);
      const double lhs = comm(x, ys);
      const double rhs = std::abs(s) / std::pow(1.0 - eps, 1.0 - s) * comm(x, y);
      if (rhs > 0) out.powers_max_ratio = std::max(out.powers_max_ratio, lhs / rhs);
      if (lhs > rhs * (1 + 1e-9) + 1e-12) ++out.powers_violations;
    }
    // polar decomposition of y = I + E with ||E|| <= 1/8
    {
      const int d = Dd(rng);
      Mat E = random_complex(d, d, rng);
      E *= (0.125 * U(rng)) / op_norm(E);
      const Mat y = Mat::Identity(d, d) + E;
      const Mat u = polar_unitary(y);
      const Mat x = random_complex(d, d, rng);
      const double lhs = comm(x, u);
      const double rhs = 3.0 * comm(x, y) + 2.0 * comm(x, y.adjoint());
      if (rhs > 0) out.polar_max_ratio = std::max(out.polar_max_ratio, lhs / rhs);
      if (!(lhs < rhs * (1 + 1e-9) + 1e-12)) ++out.polar_violations;
    }
  }
  return out;
}

}  // namespace qcalab
