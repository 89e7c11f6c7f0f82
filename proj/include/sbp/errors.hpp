#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace sbp {

/// Short rendering of a number for error messages.
inline std::string describe(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

/// Root of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates an operation's precondition.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A numerical condition (singularity, failed identity, divergence) stopped the computation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

#define SBP_DEFINE_ERROR(Name, Base)       \
  class Name : public Base {               \
   public:                                 \
    explicit Name(const std::string& what) \
        : Base(#Name ": " + what) {}       \
  };

SBP_DEFINE_ERROR(InvalidN, UsageError)
SBP_DEFINE_ERROR(GridTooSmall, UsageError)
SBP_DEFINE_ERROR(MissingAlpha, UsageError)
SBP_DEFINE_ERROR(MissingParameter, UsageError)
SBP_DEFINE_ERROR(InvalidPhi, UsageError)
SBP_DEFINE_ERROR(DimensionMismatch, UsageError)
SBP_DEFINE_ERROR(InvalidTimeStep, UsageError)

SBP_DEFINE_ERROR(SingularMatrix, NumericalError)
SBP_DEFINE_ERROR(NotSymmetric, NumericalError)
SBP_DEFINE_ERROR(InconsistentSystem, NumericalError)
SBP_DEFINE_ERROR(SingularInterior, NumericalError)
SBP_DEFINE_ERROR(TransformResidual, NumericalError)
SBP_DEFINE_ERROR(NormMismatch, NumericalError)
SBP_DEFINE_ERROR(NoCrossing, NumericalError)
SBP_DEFINE_ERROR(CalibrationAmbiguous, NumericalError)
SBP_DEFINE_ERROR(BorrowingUnavailable, NumericalError)
SBP_DEFINE_ERROR(SingularSystem, NumericalError)

#undef SBP_DEFINE_ERROR

}  // namespace sbp
