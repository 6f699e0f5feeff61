#pragma once

#include <stdexcept>
#include <string>

namespace cda {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CDA_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

CDA_DEFINE_ERROR(InvalidMarket);
CDA_DEFINE_ERROR(OutOfDomain);
CDA_DEFINE_ERROR(ProfileMismatch);
CDA_DEFINE_ERROR(NoIntramarginalMass);
CDA_DEFINE_ERROR(Degenerate);
CDA_DEFINE_ERROR(NotDifferentiableHere);
CDA_DEFINE_ERROR(AssumptionViolated);
CDA_DEFINE_ERROR(NotLinear);
CDA_DEFINE_ERROR(NoConvergence);
CDA_DEFINE_ERROR(SurfaceProjectionFailure);
CDA_DEFINE_ERROR(QuadratureFailure);
CDA_DEFINE_ERROR(NonTermination);
CDA_DEFINE_ERROR(InsufficientSamples);
CDA_DEFINE_ERROR(ConfigError);
CDA_DEFINE_ERROR(VerificationFailure);

#undef CDA_DEFINE_ERROR

}  // namespace cda
