#include <cmath>

#include "qcalab/alpu.hpp"
#include "qcalab/linalg.hpp"

namespace qcalab {

Mat jw_hopping(int N) {
  if (N < 2) throw Error(ErrorCode::InvalidArgument, "ring needs at least two modes");
  // quantized momenta 2 pi k / N in (-pi, pi]
  Mat F(N, N);
  CVec theta(N);
  for (int k = 0; k < N; ++k) {
    double t = 2.0 * M_PI * k / N;
    if (t > M_PI + 1e-12) t -= 2.0 * M_PI;
    theta(k) = t;
    for (int n = 0; n < N; ++n) F(n, k) = std::polar(1.0 / std::sqrt(static_cast<double>(N)), 2.0 * M_PI * n * k / N);
  }
  return hermitian_part(F * theta.asDiagonal() * F.adjoint());
}

namespace {

// c_n = Z ... Z a I ... I with a = |0><1|, mode 0 most significant.
Mat annihilator(int N, int n) {
  Mat a = Mat::Zero(2, 2);
  a(0, 1) = 1.0;
  Mat m = Mat::Identity(1, 1);
  for (int k = 0; k < N; ++k) m = kron(m, k < n ? pauli('Z') : (k == n ? a : Mat(Mat::Identity(2, 2))));
  return m;
}

}  // namespace

Mat jw_fock_hamiltonian(int N) {
  if (N < 2 || N > 12) throw Error(ErrorCode::InvalidArgument, "jw Hamiltonian supports 2 <= N <= 12");
  const Mat h = jw_hopping(N);
  const auto D = static_cast<Eigen::Index>(1) << N;
  std::vector<Mat> c(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) c[n] = annihilator(N, n);
  Mat H = Mat::Zero(D, D);
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < N; ++m)
      if (std::abs(h(n, m)) > 1e-15) H += h(n, m) * c[n].adjoint() * c[m];
  return hermitian_part(H);
}

JwReport jw_translation_demo(int N, const std::vector<double>& s_values) {
  if (N < 2 || N > 10) throw Error(ErrorCode::InvalidArgument, "jw demo supports 2 <= N <= 10");
  JwReport rep;
  rep.N = N;
  const Mat h = jw_hopping(N);

  Mat shift = Mat::Zero(N, N);  // S|m> = |m-1>
  for (int m = 0; m < N; ++m) shift((m - 1 + N) % N, m) = 1.0;
  rep.single_particle_residual = op_norm(exp_i_hermitian(h, 1.0) - shift);

  for (int r = 0; r <= N / 2; ++r) rep.coeff.push_back(std::abs(h(r, 0)));
  rep.coeff_ratio_min = 1e300;
  rep.coeff_ratio_max = 0.0;
  for (int r = 1; r <= N / 2; ++r) {
    rep.coeff_ratio_min = std::min(rep.coeff_ratio_min, r * rep.coeff[r]);
    rep.coeff_ratio_max = std::max(rep.coeff_ratio_max, r * rep.coeff[r]);
  }
  rep.coeff_ok = rep.coeff_ratio_min >= 0.5 && rep.coeff_ratio_max <= 2.0;

  // Fock space
  const auto D = static_cast<Eigen::Index>(1) << N;
  std::vector<Mat> c(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) c[n] = annihilator(N, n);
  const Mat H = jw_fock_hamiltonian(N);
  const Mat U = exp_i_hermitian(H, 1.0);
  Mat even = Mat::Zero(D, D);
  for (Eigen::Index b = 0; b < D; ++b)
    if (__builtin_popcountll(static_cast<unsigned long long>(b)) % 2 == 0) even(b, b) = 1.0;
  for (int n = 0; n < N; ++n) {
    const Mat diff = (U * c[n] * U.adjoint() - c[(n - 1 + N) % N]) * even;
    rep.fock_residual = std::max(rep.fock_residual, op_norm(diff));
  }
  rep.sector_note = "conjugation checked on the even-parity sector";

  // tails of e^{iHs} against an exponentially decaying hopping model
  const ChainSpec chain = ChainSpec::uniform(N, 2);
  const HamiltonianModel ref = expdecay_model(chain, 1.0, 0.5, N / 2, 0.0);
  const Mat Href = ref.dense();
  const int r_max = N / 2;
  rep.slow_decay = !s_values.empty();
  for (double s : s_values) {
    rep.s_values.push_back(s);
    rep.tails.push_back(measure_tails(Automorphism::from_unitary(chain, exp_i_hermitian(H, -s)), r_max));
    rep.reference_tails.push_back(measure_tails(Automorphism::from_unitary(chain, exp_i_hermitian(Href, -s)), r_max));
    const int far = std::max(1, r_max - 1);
    if (!(rep.tails.back().f_hat[far] > rep.reference_tails.back().f_hat[far])) rep.slow_decay = false;
  }
  return rep;
}

}  // namespace qcalab
