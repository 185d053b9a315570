#include "qcalab/algebra.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace qcalab {

Mat vec(const Mat& x) { return Eigen::Map<const CVec>(x.data(), x.size()); }

Mat unvec(const Eigen::Ref<const CVec>& v, int d) {
  Mat m(d, d);
  for (int j = 0; j < d; ++j) m.col(j) = v.segment(static_cast<Eigen::Index>(j) * d, d);
  return m;
}

namespace {

// Groups sorted values into clusters separated by gaps larger than `gap`.
std::vector<std::vector<int>> cluster_sorted(const RVec& ev, double gap) {
  std::vector<std::vector<int>> out;
  for (int k = 0; k < ev.size(); ++k) {
    if (out.empty() || ev(k) - ev(k - 1) > gap) out.emplace_back();
    out.back().push_back(k);
  }
  return out;
}

// Appends directions of C not already in span(B); returns number added.
int absorb(Mat& B, const Mat& C, double rank_rel) {
  if (C.cols() == 0) return 0;
  const double scale = std::max(1.0, C.colwise().norm().maxCoeff());
  Mat R = C;
  if (B.cols() > 0) {
    R.noalias() -= B * (B.adjoint() * R);
    R.noalias() -= B * (B.adjoint() * R);
  }
  Eigen::ColPivHouseholderQR<Mat> qr(R);
  const Mat& qrm = qr.matrixQR();
  int rank = 0;
  const int lim = static_cast<int>(std::min(qrm.rows(), qrm.cols()));
  while (rank < lim && std::abs(qrm(rank, rank)) > rank_rel * scale) ++rank;
  if (rank == 0) return 0;
  Mat Q = qr.householderQ() * Mat::Identity(R.rows(), rank);
  if (B.cols() > 0) Q -= B * (B.adjoint() * Q);
  // re-orthonormalize the new block
  Eigen::HouseholderQR<Mat> q2(Q);
  Q = q2.householderQ() * Mat::Identity(Q.rows(), rank);
  const Eigen::Index old = B.cols();
  B.conservativeResize(B.rows(), old + rank);
  B.rightCols(rank) = Q;
  return rank;
}

}  // namespace

Mat Factor::frame() const {
  const Mat& e11 = unit(0, 0);
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(e11));
  const int d = static_cast<int>(e11.rows());
  Mat g = es.eigenvectors().rightCols(m);
  Mat f(d, k * m);
  for (int i = 0; i < k; ++i) f.middleCols(static_cast<Eigen::Index>(i) * m, m) = unit(i, 0) * g;
  return f;
}

double Factor::unit_residual() const {
  double r = 0.0;
  Mat sum = Mat::Zero(projection.rows(), projection.cols());
  for (int i = 0; i < k; ++i) {
    sum += unit(i, i);
    for (int j = 0; j < k; ++j) {
      r = std::max(r, op_norm(unit(i, j).adjoint() - unit(j, i)));
      for (int l = 0; l < k; ++l)
        for (int p = 0; p < k; ++p) {
          Mat prod = unit(i, j) * unit(l, p);
          if (j == l) prod -= unit(i, p);
          r = std::max(r, op_norm(prod));
        }
    }
  }
  return std::max(r, op_norm(sum - projection));
}

OperatorAlgebra::OperatorAlgebra(Region region, std::vector<int> dims, Mat basis)
    : region_(std::move(region)), dims_(std::move(dims)), basis_(std::move(basis)) {
  d_ = 1;
  for (int x : dims_) d_ *= x;
  if (basis_.rows() != static_cast<Eigen::Index>(d_) * d_)
    throw Error(ErrorCode::RegionMismatch, "basis length does not match ambient dimension");
}

OperatorAlgebra OperatorAlgebra::full(const ChainSpec& c, const Region& r) {
  const auto dims = dims_of(c, r);
  const auto d = static_cast<Eigen::Index>(c.dim_of(r.sites));
  return OperatorAlgebra(r, dims, Mat::Identity(d * d, d * d));
}

OperatorAlgebra OperatorAlgebra::from_units(const Region& r, std::vector<int> dims, const std::vector<Factor>& fs) {
  int d = 1;
  for (int x : dims) d *= x;
  int n = 0;
  for (const Factor& f : fs) n += f.k * f.k;
  Mat B(static_cast<Eigen::Index>(d) * d, n);
  int col = 0;
  for (const Factor& f : fs)
    for (const Mat& e : f.units) {
      B.col(col) = vec(e);
      B.col(col) /= B.col(col).norm();
      ++col;
    }
  // units of a factor are already mutually orthogonal
  return OperatorAlgebra(r, std::move(dims), std::move(B));
}

Mat OperatorAlgebra::element(int k) const { return unvec(basis_.col(k), d_) * std::sqrt(static_cast<double>(d_)); }

std::vector<Mat> OperatorAlgebra::elements() const {
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(dim()));
  for (int k = 0; k < dim(); ++k) out.push_back(element(k));
  return out;
}

ChainOperator OperatorAlgebra::element_op(int k) const { return ChainOperator{region_, dims_, element(k)}; }

Mat OperatorAlgebra::project(const Mat& x) const {
  const CVec v = Eigen::Map<const CVec>(x.data(), x.size());
  const CVec p = basis_ * (basis_.adjoint() * v);
  return unvec(p, d_);
}

double OperatorAlgebra::residual(const Mat& x) const {
  const double n = op_norm(x);
  if (!(n > 0.0)) return 0.0;
  return op_norm(x - project(x)) / n;
}

Mat OperatorAlgebra::random_element(Rng& rng) const {
  const CVec c = random_complex(dim(), 1, rng);
  return unvec(basis_ * c, d_) * std::sqrt(static_cast<double>(d_));
}

Mat OperatorAlgebra::random_hermitian(Rng& rng) const { return hermitian_part(random_element(rng)); }

Mat OperatorAlgebra::random_unitary(Rng& rng) const {
  // exp(i h) of a Hermitian element stays in the (unital) algebra
  Mat h = random_hermitian(rng);
  const double n = op_norm(h);
  if (n > 0) h *= 4.0 / n;
  return exp_i_hermitian(h, 1.0);
}

const Wedderburn& OperatorAlgebra::structure() const {
  std::call_once(lazy_->once, [&] { lazy_->w = wedderburn(*this); });
  return lazy_->w;
}

OperatorAlgebra algebra_closure(const Region& region, const std::vector<int>& dims, const std::vector<Mat>& gens,
                                double rank_rel, std::size_t max_ambient) {
  int d = 1;
  for (int x : dims) d *= x;
  if (static_cast<std::size_t>(d) > max_ambient)
    throw Error(ErrorCode::DimensionCap, "algebra ambient dimension " + std::to_string(d) + " exceeds cap");
  const Eigen::Index d2 = static_cast<Eigen::Index>(d) * d;
  Mat B(d2, 0);
  {
    Mat C(d2, 1 + 2 * static_cast<Eigen::Index>(gens.size()));
    C.col(0) = vec(Mat::Identity(d, d));
    for (std::size_t g = 0; g < gens.size(); ++g) {
      if (gens[g].rows() != d) throw Error(ErrorCode::RegionMismatch, "generator size mismatch");
      C.col(1 + 2 * g) = vec(gens[g]);
      C.col(2 + 2 * g) = vec(gens[g].adjoint());
    }
    // rounding residue of vanishing generators must not be blown up to unit norm
    const double big = C.colwise().norm().maxCoeff();
    for (Eigen::Index j = 0; j < C.cols(); ++j) {
      const double n = C.col(j).norm();
      if (n > 1e-10 * big)
        C.col(j) /= n;
      else
        C.col(j).setZero();
    }
    absorb(B, C, rank_rel);
  }
  Eigen::Index next = 0;  // first column whose products are still pending
  while (next < B.cols() && B.cols() < d2) {
    const Eigen::Index r = B.cols();
    Mat a = unvec(B.col(next), d);
    Mat row(d, d * r), stack(d * r, d);
    for (Eigen::Index k = 0; k < r; ++k) {
      const Mat b = unvec(B.col(k), d);
      row.middleCols(k * d, d) = b;
      stack.middleRows(k * d, d) = b;
    }
    const Mat left = a * row;     // a b_k
    const Mat right = stack * a;  // b_k a
    Mat C(d2, 2 * r);
    for (Eigen::Index k = 0; k < r; ++k) {
      C.col(2 * k) = vec(left.middleCols(k * d, d));
      C.col(2 * k + 1) = vec(right.middleRows(k * d, d));
    }
    absorb(B, C, rank_rel);
    ++next;
  }
  return OperatorAlgebra(region, dims, std::move(B));
}

OperatorAlgebra algebra_closure(const ChainSpec& c, const std::vector<ChainOperator>& gens, double rank_rel) {
  if (gens.empty()) throw Error(ErrorCode::InvalidArgument, "no generators");
  Region r;
  for (const auto& g : gens) r = r.unite(g.support);
  std::vector<Mat> ms;
  for (const auto& g : gens) ms.push_back(embed(c, g, r).m);
  return algebra_closure(r, dims_of(c, r), ms, rank_rel);
}

Wedderburn wedderburn(const OperatorAlgebra& alg, std::uint64_t seed) {
  const int d = alg.ambient();
  const int n = alg.dim();
  Rng rng(seed);
  for (int attempt = 0; attempt < 5; ++attempt) {
    // center: elements of the algebra commuting with two generic elements
    const Mat a1 = alg.random_element(rng), a2 = alg.random_element(rng);
    Mat M(2 * static_cast<Eigen::Index>(d) * d, n);
    for (int k = 0; k < n; ++k) {
      const Mat b = alg.element(k);
      M.col(k).head(static_cast<Eigen::Index>(d) * d) = vec(b * a1 - a1 * b);
      M.col(k).tail(static_cast<Eigen::Index>(d) * d) = vec(b * a2 - a2 * b);
    }
    Eigen::BDCSVD<Mat> svd(M, Eigen::ComputeFullV);
    const RVec& sv = svd.singularValues();
    const double thr = 1e-8 * std::max(1.0, sv.size() ? sv(0) : 0.0);
    std::vector<int> null;
    for (int k = 0; k < n; ++k)
      if (k >= sv.size() || sv(k) <= thr) null.push_back(k);
    const int zdim = static_cast<int>(null.size());
    if (zdim == 0) continue;

    Mat h = Mat::Zero(d, d);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k : null) {
      const CVec coeff = svd.matrixV().col(k);
      const Mat z = unvec(alg.basis() * coeff, d);
      h += g(rng) * hermitian_part(z);
      h += g(rng) * hermitian_part(cplx(0, 1) * z);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
    const double span = es.eigenvalues().cwiseAbs().maxCoeff() + 1.0;
    auto clusters = cluster_sorted(es.eigenvalues(), 1e-6 * span);
    if (static_cast<int>(clusters.size()) != zdim) continue;

    Wedderburn w;
    w.center_dim = zdim;
    bool ok = true;
    for (const auto& cl : clusters) {
      Mat Vb(d, static_cast<Eigen::Index>(cl.size()));
      for (std::size_t k = 0; k < cl.size(); ++k) Vb.col(k) = es.eigenvectors().col(cl[k]);
      const Mat hb = Vb.adjoint() * alg.random_hermitian(rng) * Vb;
      Eigen::SelfAdjointEigenSolver<Mat> eb(hermitian_part(hb));
      const double sb = eb.eigenvalues().cwiseAbs().maxCoeff() + 1.0;
      const auto groups = cluster_sorted(eb.eigenvalues(), 1e-6 * sb);
      const int kf = static_cast<int>(groups.size());
      const int nb = static_cast<int>(cl.size());
      if (nb % kf != 0) {
        ok = false;
        break;
      }
      const int mf = nb / kf;
      std::vector<Mat> q(kf);
      bool equal = true;
      for (int i = 0; i < kf; ++i) {
        if (static_cast<int>(groups[i].size()) != mf) equal = false;
        Mat W(nb, static_cast<Eigen::Index>(groups[i].size()));
        for (std::size_t s = 0; s < groups[i].size(); ++s) W.col(s) = eb.eigenvectors().col(groups[i][s]);
        q[i] = Vb * W * W.adjoint() * Vb.adjoint();
      }
      if (!equal) {
        ok = false;
        break;
      }
      Factor f;
      f.k = kf;
      f.m = mf;
      f.projection = Vb * Vb.adjoint();
      f.units.assign(static_cast<std::size_t>(kf * kf), Mat());
      const Mat ar = alg.random_element(rng);
      std::vector<Mat> col(kf);
      for (int i = 0; i < kf; ++i) {
        if (i == 0) {
          col[0] = q[0];
          continue;
        }
        Mat t = q[i] * ar * q[0];
        const double nt = std::sqrt(std::abs((t.adjoint() * t).trace()) / mf);
        if (nt < 1e-8) {
          ok = false;
          break;
        }
        col[i] = t / nt;
      }
      if (!ok) break;
      for (int i = 0; i < kf; ++i)
        for (int j = 0; j < kf; ++j) f.units[i * kf + j] = col[i] * col[j].adjoint();
      if (f.unit_residual() > 1e-8) {
        ok = false;
        break;
      }
      w.factors.push_back(std::move(f));
    }
    if (!ok) continue;
    int total = 0;
    for (const auto& f : w.factors) total += f.k * f.k;
    if (total != n) continue;
    return w;
  }
  throw Error(ErrorCode::DegenerateSpectrum, "could not separate the center after 5 attempts");
}

double near_inclusion_eps(const ChainSpec& c, const OperatorAlgebra& alg, const Region& region) {
  double e = 0.0;
  for (int k = 0; k < alg.dim(); ++k) e = std::max(e, dist_to_region(c, alg.element_op(k), region).eps);
  return e;
}

double near_inclusion_eps(const OperatorAlgebra& alg, const OperatorAlgebra& target) {
  if (alg.ambient() != target.ambient()) throw Error(ErrorCode::RegionMismatch, "ambient mismatch");
  double e = 0.0;
  for (int k = 0; k < alg.dim(); ++k) e = std::max(e, target.residual(alg.element(k)));
  return e;
}

Factor commutant_factor(const Factor& f) {
  const Mat F = f.frame();
  const int d = static_cast<int>(F.rows());
  if (f.k * f.m != d) throw Error(ErrorCode::InvalidArgument, "commutant needs a factor spanning its ambient");
  Factor c;
  c.k = f.m;
  c.m = f.k;
  c.projection = Mat::Identity(d, d);
  for (int s = 0; s < f.m; ++s)
    for (int t = 0; t < f.m; ++t) {
      Mat e = Mat::Zero(f.m, f.m);
      e(s, t) = 1.0;
      c.units.push_back(F * kron(Mat::Identity(f.k, f.k), e) * F.adjoint());
    }
  return c;
}

Mat inner_unitary_of_automorphism(const Factor& f, const LinearMap& theta, std::uint64_t seed, double tol) {
  const int k = f.k;
  std::vector<Mat> th(static_cast<std::size_t>(k * k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) th[i * k + j] = theta(f.unit(i, j));
  auto T = [&](int i, int j) -> const Mat& { return th[static_cast<std::size_t>(i * k + j)]; };
  // multiplicativity and unitality on matrix units
  Mat sum = Mat::Zero(f.projection.rows(), f.projection.cols());
  for (int i = 0; i < k; ++i) {
    sum += T(i, i);
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < k; ++l) {
        const double r = op_norm(T(i, j) * T(j, l) - T(i, l));
        if (r > tol) throw Error(ErrorCode::NotAnAutomorphism, "theta is not multiplicative on matrix units");
      }
  }
  if (op_norm(sum - f.projection) > tol) throw Error(ErrorCode::NotAnAutomorphism, "theta is not unital");

  Mat u = intertwiner_polar(f, theta, seed);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (op_norm(T(i, j) - u.adjoint() * f.unit(i, j) * u) > tol)
        throw Error(ErrorCode::NotAnAutomorphism, "intertwiner residual too large");
  return u;
}

Mat intertwiner_polar(const Factor& f, const LinearMap& theta, std::uint64_t seed) {
  const int k = f.k;
  std::vector<Mat> t0(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) t0[i] = theta(f.unit(0, i));
  // a y = y theta(a) for y = sum_i e_i1 x theta(e_1i)
  Rng rng(seed);
  const int d = static_cast<int>(f.projection.rows());
  Mat x = Mat::Identity(d, d);
  for (int attempt = 0; attempt < 6; ++attempt) {
    Mat y = Mat::Zero(d, d);
    for (int i = 0; i < k; ++i) y += f.unit(i, 0) * x * t0[i];
    double smin = 0.0;
    Mat u = polar_unitary(y, &smin);
    if (smin > 1e-6 * std::max(1.0, op_norm(y))) return fix_phase(u);
    x = haar_unitary(d, rng);
  }
  throw Error(ErrorCode::NumericalFailure, "intertwiner stayed singular");
}

Factor full_factor(int d) {
  Factor f;
  f.k = d;
  f.m = 1;
  f.projection = Mat::Identity(d, d);
  f.units = matrix_units(d);
  return f;
}

AlgebraIso factor_iso(const Factor& source, const Factor& target) {
  if (source.k != target.k || source.m != target.m) throw Error(ErrorCode::InvalidArgument, "factors differ in shape");
  const Mat Fs = source.frame(), Ft = target.frame();
  AlgebraIso iso;
  iso.unitary_witness = Ft * Fs.adjoint();
  for (int i = 0; i < source.k; ++i)
    for (int j = 0; j < source.k; ++j)
      iso.residual = std::max(iso.residual, op_norm(iso.unitary_witness * source.unit(i, j) *
                                                        iso.unitary_witness.adjoint() -
                                                    target.unit(i, j)));
  return iso;
}

}  // namespace qcalab
