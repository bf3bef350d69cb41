#pragma once

#include <stdexcept>
#include <string>

namespace ucs {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Case / load parsing
struct SchemaError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };
struct NegativeLoadError : Error { using Error::Error; };
struct DisconnectedNetworkError : Error { using Error::Error; };
struct SingularNetworkError : Error { using Error::Error; };

// Solvers
struct NumericalBreakdownError : Error { using Error::Error; };
struct IterationLimitError : Error { using Error::Error; };
struct NotOptimalError : Error { using Error::Error; };

// Formulation / screening
struct InvalidFixError : Error { using Error::Error; };
struct InvalidRangeError : Error { using Error::Error; };
struct ScheduleCoverageError : Error { using Error::Error; };
struct CoverageError : Error { using Error::Error; };
struct UniverseMismatchError : Error { using Error::Error; };

// Predictor
struct EmptyTrainingError : Error { using Error::Error; };
struct DimensionMismatchError : Error { using Error::Error; };

// Harness
struct TooLargeError : Error { using Error::Error; };

}  // namespace ucs
