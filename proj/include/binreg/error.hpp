#pragma once

#include <stdexcept>
#include <string>

namespace binreg {

// Base of every error the library throws. Callers that only care about
// "bad input vs. numerical trouble" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BINREG_DEFINE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

// Dataset construction / ingestion.
BINREG_DEFINE_ERROR(NonBinaryLabel);
BINREG_DEFINE_ERROR(EmptyGroup);
BINREG_DEFINE_ERROR(DimensionMismatch);
BINREG_DEFINE_ERROR(NonFiniteValue);
BINREG_DEFINE_ERROR(CsvError);

// Link functions.
BINREG_DEFINE_ERROR(OutOfRange);
BINREG_DEFINE_ERROR(UnknownLink);

// Overlap / LP.
BINREG_DEFINE_ERROR(DimensionError);
BINREG_DEFINE_ERROR(LPNumericalFailure);

// Fitting and verification.
BINREG_DEFINE_ERROR(ConfigError);
BINREG_DEFINE_ERROR(PreconditionError);
BINREG_DEFINE_ERROR(OracleBoundsError);
BINREG_DEFINE_ERROR(GenerationFailure);

#undef BINREG_DEFINE_ERROR

}  // namespace binreg
