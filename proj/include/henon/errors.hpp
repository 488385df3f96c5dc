#pragma once

#include <stdexcept>
#include <string>

namespace henon {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define HENON_ERROR(Name)                  \
  struct Name : Error {                    \
    using Error::Error;                    \
  }

HENON_ERROR(DomainError);
HENON_ERROR(SingularDiagonal);
HENON_ERROR(MeshTooCoarse);
HENON_ERROR(MeshMismatch);
HENON_ERROR(RegularizationRequired);
HENON_ERROR(InvalidInit);
HENON_ERROR(NotConverged);
HENON_ERROR(RescaleFailed);
HENON_ERROR(UnsupportedExponent);
HENON_ERROR(DimensionError);
HENON_ERROR(ExponentTooSmall);
HENON_ERROR(RegimeRefused);
HENON_ERROR(ConfigError);
HENON_ERROR(IoError);

#undef HENON_ERROR

}  // namespace henon
