#pragma once

#include <stdexcept>
#include <string>

namespace relucert {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LengthMismatch : Error { using Error::Error; };
struct DimMismatch : Error { using Error::Error; };
struct NonFiniteValue : Error { using Error::Error; };
struct NonpositiveScale : Error { using Error::Error; };
struct InvalidPermutation : Error { using Error::Error; };
struct DegenerateNormal : Error { using Error::Error; };
struct PatternCapExceeded : Error { using Error::Error; };
struct InfeasibleGeometry : Error { using Error::Error; };
struct NoInteriorPoint : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct OrderViolation : Error { using Error::Error; };
struct InfeasibleQ : Error { using Error::Error; };
struct InternalCaseViolation : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

} // namespace relucert
