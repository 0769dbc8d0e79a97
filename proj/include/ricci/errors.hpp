#pragma once

#include <stdexcept>
#include <string>

namespace ricci {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched or unsupported tensor/chart dimensions.
struct DimensionError : Error { using Error::Error; };

// Point outside a chart's domain box (or inside the finite-difference margin).
struct DomainError : Error { using Error::Error; };

// Metric not positive definite / not invertible where required.
struct SingularMetricError : Error { using Error::Error; };

// |f'| below the regularity threshold where a quantity divides by f'.
struct SingularPointError : Error { using Error::Error; };

// |grad f| below threshold: the soliton curvature identity is vacuous there.
struct DegenerateGradientError : Error { using Error::Error; };

// Derivative depth not supported by the selected engine at usable accuracy.
struct UnsupportedDepthError : Error { using Error::Error; };

// Scenario file violates the schema (unknown field, bad type, bad value).
struct SchemaError : Error { using Error::Error; };

// Invalid ODE state or initial data (non-finite, h <= 0, ...).
struct InvalidStateError : Error { using Error::Error; };

}  // namespace ricci
