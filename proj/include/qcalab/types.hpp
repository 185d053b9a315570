#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qcalab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr const char* kVersion = "qcalab 0.3.0";

enum class ErrorCode {
  InvalidArgument,
  RegionMismatch,
  ZeroOperator,
  DimensionCap,
  DegenerateSpectrum,
  NotAnAutomorphism,
  EpsilonTooLarge,
  SingularY,
  SpectralGapFailure,
  OpenChainUnsupported,
  OverlapInLayer,
  FactorizationFailure,
  SpecMismatch,
  NonzeroIndex,
  IndexMismatch,
  WindowTooLarge,
  Divergent,
  LogBranchFailure,
  NumericalFailure,
  ConfigError,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Tolerances used throughout. Reports echo these values.
struct Tolerances {
  double unitarity = 1e-10;
  double eig_clamp = 1e-12;
  double rank_rel = 1e-9;
  double residual = 1e-8;
  double entropy_floor = 1e-12;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace qcalab
