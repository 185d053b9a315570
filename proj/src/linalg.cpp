#include "qcalab/linalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qcalab {

const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RegionMismatch: return "RegionMismatch";
    case ErrorCode::ZeroOperator: return "ZeroOperator";
    case ErrorCode::DimensionCap: return "DimensionCap";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::NotAnAutomorphism: return "NotAnAutomorphism";
    case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::SingularY: return "SingularY";
    case ErrorCode::SpectralGapFailure: return "SpectralGapFailure";
    case ErrorCode::OpenChainUnsupported: return "OpenChainUnsupported";
    case ErrorCode::OverlapInLayer: return "OverlapInLayer";
    case ErrorCode::FactorizationFailure: return "FactorizationFailure";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::NonzeroIndex: return "NonzeroIndex";
    case ErrorCode::IndexMismatch: return "IndexMismatch";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::Divergent: return "Divergent";
    case ErrorCode::LogBranchFailure: return "LogBranchFailure";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

cplx hs_inner(const Mat& a, const Mat& b) {
  return (a.adjoint() * b).trace() / static_cast<double>(a.rows());
}

double hs_norm(const Mat& a) { return a.norm() / std::sqrt(static_cast<double>(a.rows())); }

double op_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  if (a.isApprox(a.adjoint(), 1e-12)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  if (a.isApprox(-a.adjoint(), 1e-12)) {  // commutators of Hermitian operators
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(cplx(0.0, 1.0) * a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

double min_singular(const Mat& a) {
  Eigen::BDCSVD<Mat> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

Mat polar_unitary(const Mat& y, double* smin) {
  Eigen::BDCSVD<Mat> svd(y, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (smin) *smin = svd.singularValues()(svd.singularValues().size() - 1);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Mat exp_i_hermitian(const Mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  CVec ph(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < ph.size(); ++k) ph(k) = std::polar(1.0, t * es.eigenvalues()(k));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

void normal_eig(const Mat& u, CVec& evals, Mat& evecs) {
  Eigen::ComplexSchur<Mat> schur(u);
  evals = schur.matrixT().diagonal();
  evecs = schur.matrixU();
}

Mat log_unitary(const Mat& u, double margin) {
  CVec ev;
  Mat v;
  normal_eig(u, ev, v);
  CVec lg(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev(k) + 1.0) < margin) throw Error(ErrorCode::LogBranchFailure, "eigenvalue at -1");
    lg(k) = cplx(0.0, std::arg(ev(k)));
  }
  return v * lg.asDiagonal() * v.adjoint();
}

Mat normal_power(const Mat& y, double s) {
  CVec ev;
  Mat v;
  normal_eig(y, ev, v);
  CVec p(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) p(k) = std::pow(ev(k), s);
  return v * p.asDiagonal() * v.adjoint();
}

Mat spectral_projector(const Mat& h, double cut) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  Mat p = Mat::Zero(h.rows(), h.cols());
  for (Eigen::Index k = 0; k < h.rows(); ++k)
    if (es.eigenvalues()(k) > cut) p += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  return p;
}

Mat random_complex(int n, int m, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat a(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      a(i, j) = cplx(re, im);
    }
  return a;
}

Mat haar_unitary(int n, Rng& rng) {
  Mat z = random_complex(n, n, rng) / std::sqrt(2.0);
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const cplx d = r(k, k);
    const double ad = std::abs(d);
    q.col(k) *= ad > 0 ? d / ad : cplx(1.0);
  }
  return q;
}

Mat random_hermitian(int n, Rng& rng) {
  Mat a = random_complex(n, n, rng);
  return 0.5 * (a + a.adjoint());
}

Mat fix_phase(const Mat& u) {
  const cplx tr = u.trace();
  if (std::abs(tr) > 1e-8 * u.rows()) return u * (std::abs(tr) / tr);
  Eigen::Index bi = 0, bj = 0;
  u.cwiseAbs().maxCoeff(&bi, &bj);
  const cplx e = u(bi, bj);
  if (std::abs(e) == 0.0) return u;
  return u * (std::abs(e) / e);
}

double phase_distance(const Mat& a, const Mat& b) {
  const cplx ov = (b.adjoint() * a).trace();
  const cplx ph = std::abs(ov) > 0 ? std::abs(ov) / ov : cplx(1.0);
  return op_norm(a * ph - b);
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat pauli(char c) {
  Mat m = Mat::Zero(2, 2);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw Error(ErrorCode::InvalidArgument, std::string("unknown Pauli ") + c);
  }
  return m;
}

Mat weyl(int d, int a, int b) {
  Mat m = Mat::Zero(d, d);
  const double w = 2.0 * M_PI / d;
  // X^a Z^b |j> = omega^{b j} |j + a>
  for (int j = 0; j < d; ++j) m((j + a) % d, j) = std::polar(1.0, w * b * j);
  return m;
}

bool is_unitary(const Mat& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return op_norm(u.adjoint() * u - Mat::Identity(u.rows(), u.cols())) <= tol;
}

}  // namespace qcalab
