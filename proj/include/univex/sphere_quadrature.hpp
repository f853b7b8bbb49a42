#pragma once

#include "univex/types.hpp"

#include <type_traits>
#include <utility>
#include <vector>

namespace univex {

/// Weighted node set on S^{n-1}, n ∈ {2, 3}.
///
/// Integrates restrictions of polynomials of degree <= exact_degree exactly.
/// Node sets are antipodally closed: for every node u the node -u is present
/// with bitwise-negated coordinates and the same weight, so odd integrands
/// cancel to rounding.
struct SphereQuadrature {
    int dimension = 0;
    Matrix nodes;  // dimension x count, unit columns
    Vector weights;
    int exact_degree = 0;

    Eigen::Index size() const { return weights.size(); }
};

/// Weighted finite subset of SO(n) approximating the normalized Haar measure.
struct RotationQuadrature {
    int dimension = 0;
    std::vector<Matrix> elements;
    std::vector<Vector> parameters;  // angle (n = 2) or ZYZ Euler angles (n = 3)
    Vector weights;
    int exact_order = 0;

    Eigen::Index size() const { return weights.size(); }
};

/// Gauss-Legendre nodes and weights on [a, b].
std::pair<Vector, Vector> gauss_legendre(int count, double a = -1.0, double b = 1.0);

/// n = 2: uniform angles (count a multiple of 4).
/// n = 3: composite Gauss-Legendre in cos(theta) on [-1, 0] and [0, 1] times a
/// uniform azimuth grid of even size.
SphereQuadrature build_sphere_quadrature(int dimension, int exact_degree);

double integrate_sphere(const SphereQuadrature& q, const Vector& values_at_nodes);

template <typename F>
    requires std::is_convertible_v<std::invoke_result_t<F&, const Vector&>, double>
double integrate_sphere(const SphereQuadrature& q, F&& f)
{
    double sum = 0.0;
    for (Eigen::Index k = 0; k < q.size(); ++k) sum += q.weights[k] * f(Vector(q.nodes.col(k)));
    return sum;
}

/// Copy of q with every node mapped by the rotation.
SphereQuadrature rotated(const SphereQuadrature& q, const Matrix& rotation);

Matrix rotation_2d(double angle);
Matrix rotation_zyz(double alpha, double beta, double gamma);

/// n = 2: R uniform angles with R the smallest power of two >= 2 * exact_order + 1.
/// n = 3: ZYZ Euler product with 2 * exact_order + 2 azimuthal nodes per outer angle
/// and exact_order + 1 Gauss-Legendre nodes in cos(beta).
/// Exact for products t^m t^{m'} with m, m' <= exact_order.
RotationQuadrature build_rotation_quadrature(int dimension, int exact_order);

RotationQuadrature uniform_rotation_quadrature(int count);
RotationQuadrature euler_rotation_quadrature(int azimuth_count, int polar_count);

} // namespace univex
