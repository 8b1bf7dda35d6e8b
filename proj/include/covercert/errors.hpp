#ifndef COVERCERT_ERRORS_HPP
#define COVERCERT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace covercert {

// Base for everything this library throws on contract violations.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFiniteEntry : Error { using Error::Error; };
struct DimMismatch : Error { using Error::Error; };
struct NegativeEigenvalue : Error { using Error::Error; };
struct InvalidP : Error { using Error::Error; };
struct SupportViolation : Error { using Error::Error; };
struct InvalidDistribution : Error { using Error::Error; };
struct ZeroReferenceWeight : Error { using Error::Error; };
struct InvalidEps : Error { using Error::Error; };
struct ParityError : Error { using Error::Error; };
struct GraphShapeError : Error { using Error::Error; };
struct LambdaOutOfRange : Error { using Error::Error; };
struct FactorizationViolation : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ValidationFailure : Error { using Error::Error; };

}  // namespace covercert

#endif
