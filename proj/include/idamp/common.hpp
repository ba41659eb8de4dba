#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace idamp {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

// Error kinds. The numeric values are the status codes of the C API.
enum class ErrorCode : int {
  InvalidArgument = 1,
  ConfigInvalid = 2,
  AcceptanceFailed = 3,
  Numerical = 4,
  NonMonotone = 5,
  RegularityFail = 6,
  OutOfRange = 7,
  GradingMissing = 8,
  NearSingular = 9,
  NoConvergence = 10,
  StepTooLarge = 11,
  Rejected = 12,
  TailTooLarge = 13,
  PoorFit = 14,
  WitnessMismatch = 15,
  NotInSpace = 16,
  Io = 17,
  Internal = 18,
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

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) { throw Error(c, msg); }

inline double sup_norm(const CVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Japanese bracket <k> = sqrt(1+k^2).
inline double jbracket(double k) { return std::sqrt(1.0 + k * k); }

}  // namespace idamp
