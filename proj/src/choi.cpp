#include "qcalab/choi.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "qcalab/stability.hpp"

namespace qcalab {

namespace {

void window_regions(const ChainSpec& c, int cut, int w, Region& L, Region& R) {
  if (w < 1) throw Error(ErrorCode::WindowTooLarge, "window must be positive");
  if (c.boundary == Boundary::Periodic) {
    if (2 * w >= c.num_sites)
      throw Error(ErrorCode::WindowTooLarge, "windows of " + std::to_string(w) + " overlap on a ring of " +
                                                 std::to_string(c.num_sites));
  } else if (cut - w < 0 || cut + w > c.num_sites) {
    throw Error(ErrorCode::WindowTooLarge, "windows leave the open chain");
  }
  L = Region::interval(c, cut - w, w);
  R = Region::interval(c, cut, w);
}

double log_dim(const ChainSpec& c, const Region& r) {
  double s = 0.0;
  for (int x : r.sites) s += std::log(static_cast<double>(c.local_dims[x]));
  return s;
}

}  // namespace

const char* entropy_name(Entropy e) { return e == Entropy::VonNeumann ? "von_neumann" : "renyi2"; }

std::vector<int> ChoiState::doubled_dims() const {
  std::vector<int> d = chain.local_dims;
  d.insert(d.end(), chain.local_dims.begin(), chain.local_dims.end());
  return d;
}

ChoiState choi_state(const Automorphism& a) {
  const ChainSpec& c = a.chain();
  const std::size_t D = c.total_dim();
  if (D > c.max_dim || D > c.max_state / D) throw Error(ErrorCode::DimensionCap, "Choi state exceeds amplitude cap");
  const Mat& u = a.unitary();
  const auto n = static_cast<Eigen::Index>(D);
  ChoiState s{c, CVec(n * n)};
  const double f = 1.0 / std::sqrt(static_cast<double>(D));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) s.psi(i * n + j) = u(i, j) * f;
  return s;
}

double entropy(const Mat& rho, Entropy e, double floor) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(rho), Eigen::EigenvaluesOnly);
  const RVec& ev = es.eigenvalues();
  if (e == Entropy::Renyi2) {
    double p2 = 0.0;
    for (int k = 0; k < ev.size(); ++k)
      if (ev(k) > floor) p2 += ev(k) * ev(k);
    return -std::log(p2);
  }
  double s = 0.0;
  for (int k = 0; k < ev.size(); ++k)
    if (ev(k) > floor) s -= ev(k) * std::log(ev(k));
  return s;
}

Mat reduced_state(const ChoiState& s, const Region& doubled) {
  for (int x : doubled.sites)
    if (x < 0 || x >= s.doubled_sites()) throw Error(ErrorCode::RegionMismatch, "site outside the doubled chain");
  return kernels::reduced_density(s.psi, SplitIndex(s.doubled_dims(), doubled.sites));
}

double mutual_information(const ChoiState& s, const Region& A, const Region& B, Entropy e) {
  if (!A.intersect(B).empty()) throw Error(ErrorCode::RegionMismatch, "regions overlap");
  return entropy(reduced_state(s, A), e) + entropy(reduced_state(s, B), e) - entropy(reduced_state(s, A.unite(B)), e);
}

MiIndex index_mi(const Automorphism& a, int cut, int window, Entropy e) {
  const ChainSpec& c = a.chain();
  Region L, R;
  window_regions(c, cut, window, L, R);
  const Region none;
  const double sLp = entropy(choi_marginal(a, none, L), e);
  const double sR = entropy(choi_marginal(a, R, none), e);
  const double sL = entropy(choi_marginal(a, L, none), e);
  const double sRp = entropy(choi_marginal(a, none, R), e);
  MiIndex out;
  out.i_primed_left = sLp + sR - entropy(choi_marginal(a, R, L), e);
  out.i_primed_right = sL + sRp - entropy(choi_marginal(a, L, R), e);
  out.value = round_index(0.5 * (out.i_primed_left - out.i_primed_right), c.primes());
  out.certified = a.locality().kind == LocalityKind::ExactRadius && a.locality().radius <= window;
  if (out.certified && out.value.residual > 1e-8)
    throw Error(ErrorCode::NumericalFailure,
                "certified QCA gave off-lattice index " + std::to_string(out.value.raw));
  return out;
}

double index_entropy_diff(const Automorphism& a, int cut, int window) {
  Region L, R;
  window_regions(a.chain(), cut, window, L, R);
  return 0.5 * (entropy(choi_marginal(a, L, R), Entropy::VonNeumann) -
                entropy(choi_marginal(a, R, L), Entropy::VonNeumann));
}

ContinuityReport mi_continuity_experiment(const Automorphism& a1, const Automorphism& a2, int cut, int window,
                                          std::uint64_t seed) {
  const ChainSpec& c = a1.chain();
  if (!c.same_geometry(a2.chain())) throw Error(ErrorCode::SpecMismatch, "chains differ");
  Region L, R;
  window_regions(c, cut, window, L, R);
  const Region X = L.unite(R);
  ContinuityReport rep;
  const RestrictedDistance rd = restricted_distance(c, a1.unitary(), a2.unitary(), X, seed);
  rep.eps_lower = rd.lower;
  rep.eps_upper = rd.upper;
  const Mat diff = choi_marginal(a1, X, X) - choi_marginal(a2, X, X);
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(diff), Eigen::EigenvaluesOnly);
  rep.trace_distance = 0.5 * es.eigenvalues().cwiseAbs().sum();
  rep.delta_index = std::abs(index_mi(a1, cut, window).value.raw - index_mi(a2, cut, window).value.raw);
  const double eh = rep.eps_upper;
  rep.bound = eh > 0 ? 3.0 * eh * log_dim(c, X) + eh * std::log(1.0 / eh) : 0.0;
  rep.ok = rep.delta_index <= rep.bound + 1e-9;
  return rep;
}

}  // namespace qcalab
