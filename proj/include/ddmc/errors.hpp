#pragma once

#include <stdexcept>
#include <string>

namespace ddmc {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define DDMC_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                          \
  public:                                                              \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

DDMC_DEFINE_ERROR(NonPositivePermeability);
DDMC_DEFINE_ERROR(SingularSystem);
DDMC_DEFINE_ERROR(SensorOffGrid);
DDMC_DEFINE_ERROR(EdgeOffGrid);
DDMC_DEFINE_ERROR(Unsupported);
DDMC_DEFINE_ERROR(RootBracketFailure);
DDMC_DEFINE_ERROR(TruncationOverflow);
DDMC_DEFINE_ERROR(PointOutsideDomain);
DDMC_DEFINE_ERROR(QuadratureGridMismatch);
DDMC_DEFINE_ERROR(BasisMismatch);
DDMC_DEFINE_ERROR(EmptySampleSet);
DDMC_DEFINE_ERROR(FactorizationFailure);
DDMC_DEFINE_ERROR(DegenerateData);
DDMC_DEFINE_ERROR(PoolExhausted);
DDMC_DEFINE_ERROR(LengthMismatch);
DDMC_DEFINE_ERROR(InitOutsideSupport);
DDMC_DEFINE_ERROR(SensorOutsideDomain);
DDMC_DEFINE_ERROR(MissingInterfaceModel);
DDMC_DEFINE_ERROR(MissingArtifact);
DDMC_DEFINE_ERROR(ConfigError);

#undef DDMC_DEFINE_ERROR

}  // namespace ddmc
