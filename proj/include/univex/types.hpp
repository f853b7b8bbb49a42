#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>

namespace univex {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr const char* kVersion = "0.3.1";

/// Surface measure of S^{n-1}: 2π for n = 2, 4π for n = 3.
inline double sphere_measure(int dimension)
{
    if (dimension == 2) return 2.0 * std::numbers::pi;
    if (dimension == 3) return 4.0 * std::numbers::pi;
    throw std::invalid_argument("unsupported dimension " + std::to_string(dimension) + " (expected 2 or 3)");
}

inline void require_dimension(int dimension)
{
    if (dimension != 2 && dimension != 3)
        throw std::invalid_argument("unsupported dimension " + std::to_string(dimension) + " (expected 2 or 3)");
}

// Raised when a quadrature rule cannot resolve the requested harmonic order.
class QuadratureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A documented precondition of an algorithm does not hold for the input body.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace univex
