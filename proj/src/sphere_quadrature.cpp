#include "univex/sphere_quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace univex {

namespace {

constexpr double kPi = std::numbers::pi;

int round_up(int value, int multiple) { return ((value + multiple - 1) / multiple) * multiple; }

// (P_n(z), P_n'(z)) by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double z)
{
    double prev = 1.0, cur = z;
    for (int k = 2; k <= n; ++k) {
        const double next = ((2.0 * k - 1.0) * z * cur - (k - 1.0) * prev) / k;
        prev = cur;
        cur = next;
    }
    if (n == 1) return {z, 1.0};
    return {cur, n * (z * cur - prev) / (z * z - 1.0)};
}

} // namespace

std::pair<Vector, Vector> gauss_legendre(int count, double a, double b)
{
    if (count < 1) throw std::invalid_argument("gauss_legendre: count must be positive");
    Vector x(count), w(count);
    for (int i = 0; i < (count + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_count.
        double z = std::cos(kPi * (i + 0.75) / (count + 0.5));
        double derivative = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre_with_derivative(count, z);
            derivative = dp;
            const double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        derivative = legendre_with_derivative(count, z).second;
        const double weight = 2.0 / ((1.0 - z * z) * derivative * derivative);
        x[i] = -z;
        x[count - 1 - i] = z;
        w[i] = weight;
        w[count - 1 - i] = weight;
    }
    if (count % 2 == 1) x[count / 2] = 0.0;
    const double scale = 0.5 * (b - a), shift = 0.5 * (b + a);
    return {(scale * x.array() + shift).matrix(), scale * w};
}

SphereQuadrature build_sphere_quadrature(int dimension, int exact_degree)
{
    require_dimension(dimension);
    if (exact_degree < 0) throw std::invalid_argument("exact_degree must be non-negative");

    SphereQuadrature q;
    q.dimension = dimension;
    q.exact_degree = exact_degree;

    if (dimension == 2) {
        const int count = std::max(4, round_up(exact_degree + 1, 4));
        const int half = count / 2;
        q.nodes.resize(2, count);
        for (int k = 0; k < half; ++k) {
            const double phi = 2.0 * kPi * k / count;
            q.nodes(0, k) = std::cos(phi);
            q.nodes(1, k) = std::sin(phi);
            q.nodes.col(k + half) = -q.nodes.col(k);
        }
        q.weights = Vector::Constant(count, 2.0 * kPi / count);
        return q;
    }

    // Each hemisphere panel carries p Gauss nodes, exact to degree 2p - 1.
    const int polar = (exact_degree + 2) / 2;
    const int azimuth = std::max(2, round_up(exact_degree + 1, 2));
    const auto [z, wz] = gauss_legendre(polar, 0.0, 1.0);
    const int upper = polar * azimuth;
    q.nodes.resize(3, 2 * upper);
    q.weights.resize(2 * upper);
    int k = 0;
    for (int i = 0; i < polar; ++i) {
        const double s = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
        for (int l = 0; l < azimuth; ++l) {
            const double phi = 2.0 * kPi * l / azimuth;
            q.nodes(0, k) = s * std::cos(phi);
            q.nodes(1, k) = s * std::sin(phi);
            q.nodes(2, k) = z[i];
            q.weights[k] = wz[i] * 2.0 * kPi / azimuth;
            q.nodes.col(k + upper) = -q.nodes.col(k);
            q.weights[k + upper] = q.weights[k];
            ++k;
        }
    }
    return q;
}

double integrate_sphere(const SphereQuadrature& q, const Vector& values_at_nodes)
{
    if (values_at_nodes.size() != q.size())
        throw std::invalid_argument("integrate_sphere: value count does not match node count");
    return q.weights.dot(values_at_nodes);
}

SphereQuadrature rotated(const SphereQuadrature& q, const Matrix& rotation)
{
    SphereQuadrature out = q;
    out.nodes = rotation * q.nodes;
    return out;
}

Matrix rotation_2d(double angle)
{
    Matrix r(2, 2);
    const double c = std::cos(angle), s = std::sin(angle);
    r << c, -s, s, c;
    return r;
}

Matrix rotation_zyz(double alpha, double beta, double gamma)
{
    const Eigen::Matrix3d r = (Eigen::AngleAxisd(alpha, Eigen::Vector3d::UnitZ())
                               * Eigen::AngleAxisd(beta, Eigen::Vector3d::UnitY())
                               * Eigen::AngleAxisd(gamma, Eigen::Vector3d::UnitZ()))
                                  .toRotationMatrix();
    return r;
}

RotationQuadrature uniform_rotation_quadrature(int count)
{
    if (count < 1) throw std::invalid_argument("rotation count must be positive");
    RotationQuadrature rq;
    rq.dimension = 2;
    rq.exact_order = (count - 1) / 2;
    rq.weights = Vector::Constant(count, 1.0 / count);
    rq.elements.reserve(count);
    rq.parameters.reserve(count);
    for (int r = 0; r < count; ++r) {
        const double alpha = 2.0 * kPi * r / count;
        rq.elements.push_back(rotation_2d(alpha));
        rq.parameters.push_back(Vector::Constant(1, alpha));
    }
    return rq;
}

RotationQuadrature euler_rotation_quadrature(int azimuth_count, int polar_count)
{
    if (azimuth_count < 1 || polar_count < 1) throw std::invalid_argument("rotation counts must be positive");
    RotationQuadrature rq;
    rq.dimension = 3;
    rq.exact_order = std::min((azimuth_count - 1) / 2, polar_count - 1);
    const auto [x, wx] = gauss_legendre(polar_count);
    const int total = azimuth_count * polar_count * azimuth_count;
    rq.weights.resize(total);
    rq.elements.reserve(total);
    rq.parameters.reserve(total);
    int k = 0;
    for (int a = 0; a < azimuth_count; ++a) {
        const double alpha = 2.0 * kPi * a / azimuth_count;
        for (int b = 0; b < polar_count; ++b) {
            const double beta = std::acos(x[b]);
            for (int g = 0; g < azimuth_count; ++g) {
                const double gamma = 2.0 * kPi * g / azimuth_count;
                rq.elements.push_back(rotation_zyz(alpha, beta, gamma));
                rq.parameters.push_back(Eigen::Vector3d(alpha, beta, gamma));
                rq.weights[k++] = wx[b] / (2.0 * azimuth_count * azimuth_count);
            }
        }
    }
    return rq;
}

RotationQuadrature build_rotation_quadrature(int dimension, int exact_order)
{
    require_dimension(dimension);
    if (exact_order < 0) throw std::invalid_argument("exact_order must be non-negative");
    if (dimension == 2) {
        int count = 1;
        while (count < 2 * exact_order + 1) count *= 2;
        RotationQuadrature rq = uniform_rotation_quadrature(count);
        return rq;
    }
    RotationQuadrature rq = euler_rotation_quadrature(2 * exact_order + 2, exact_order + 1);
    rq.exact_order = exact_order;
    return rq;
}

} // namespace univex
