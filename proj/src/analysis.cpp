#include "univex/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace univex {

namespace {

void require_resolution(const SphereQuadrature& q, int m)
{
    if (m < 0) throw std::out_of_range("negative harmonic order");
    if (q.exact_degree < 2 * m + kProjectionHeadroom)
        throw QuadratureError("sphere quadrature of exact degree " + std::to_string(q.exact_degree)
                              + " cannot resolve order " + std::to_string(m) + " (needs "
                              + std::to_string(2 * m + kProjectionHeadroom) + ")");
}

} // namespace

HarmonicExpansion expand_values(const Vector& values, int m_max, const SphereQuadrature& q)
{
    require_resolution(q, m_max);
    if (values.size() != q.size()) throw std::invalid_argument("value count does not match node count");
    const int n = q.dimension;
    Vector acc = Vector::Zero(harmonic_count(n, m_max));
    for (Eigen::Index k = 0; k < q.size(); ++k)
        acc += (q.weights[k] * values[k]) * eval_harmonics_upto<double>(n, m_max, Vector(q.nodes.col(k)));
    std::vector<Vector> blocks;
    for (int m = 0; m <= m_max; ++m) blocks.push_back(acc.segment(harmonic_offset(n, m), harmonic_dimension(n, m)));
    return HarmonicExpansion(n, std::move(blocks));
}

HarmonicExpansion expand(const ConvexBody& body, int m_max, const SphereQuadrature& q)
{
    if (body.dimension() != q.dimension) throw std::invalid_argument("body and quadrature dimensions differ");
    require_resolution(q, m_max);
    return expand_values(support(body, q.nodes), m_max, q);
}

Vector project(const ConvexBody& body, int m, const SphereQuadrature& q)
{
    if (body.dimension() != q.dimension) throw std::invalid_argument("body and quadrature dimensions differ");
    require_resolution(q, m);
    const int n = q.dimension;
    const Vector h = support(body, q.nodes);
    Vector acc = Vector::Zero(harmonic_dimension(n, m));
    const int offset = harmonic_offset(n, m);
    for (Eigen::Index k = 0; k < q.size(); ++k)
        acc += (q.weights[k] * h[k])
               * eval_harmonics_upto<double>(n, m, Vector(q.nodes.col(k))).segment(offset, acc.size());
    return acc;
}

double mean_width(const ConvexBody& body, const SphereQuadrature& q)
{
    if (body.dimension() != q.dimension) throw std::invalid_argument("body and quadrature dimensions differ");
    return 2.0 / sphere_measure(q.dimension) * integrate_sphere(q, support(body, q.nodes));
}

Vector steiner_point(const ConvexBody& body, const SphereQuadrature& q)
{
    if (body.dimension() != q.dimension) throw std::invalid_argument("body and quadrature dimensions differ");
    const Vector h = support(body, q.nodes);
    return (q.dimension / sphere_measure(q.dimension)) * (q.nodes * q.weights.cwiseProduct(h));
}

std::vector<int> UniversalityCertificate::failing_orders(bool central) const
{
    std::vector<int> out;
    for (int m = 0; m <= m_max; ++m)
        if ((!central || m % 2 == 0) && !(norms[static_cast<std::size_t>(m)] > threshold)) out.push_back(m);
    return out;
}

UniversalityCertificate certificate_from_norms(std::string body_id, std::vector<double> norms, double threshold)
{
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    if (norms.empty()) throw std::invalid_argument("certificate needs at least the order-0 norm");
    UniversalityCertificate cert;
    cert.body_id = std::move(body_id);
    cert.m_max = static_cast<int>(norms.size()) - 1;
    cert.norms = std::move(norms);
    cert.threshold = threshold;
    cert.universal = cert.failing_orders(false).empty();
    cert.centrally_universal = cert.failing_orders(true).empty();
    return cert;
}

UniversalityCertificate certify(const ConvexBody& body, int m_max, double threshold, const SphereQuadrature& q,
                                std::string body_id)
{
    const HarmonicExpansion e = expand(body, m_max, q);
    std::vector<double> norms;
    for (int m = 0; m <= m_max; ++m) norms.push_back(e.order_norm(m));
    return certificate_from_norms(std::move(body_id), std::move(norms), threshold);
}

bool odd_orders_vanish(const UniversalityCertificate& cert)
{
    for (int m = 3; m <= cert.m_max; m += 2)
        if (cert.norms[static_cast<std::size_t>(m)] > cert.threshold) return false;
    return true;
}

Matrix rotation_taking(const Vector& from, const Vector& to)
{
    if (from.size() != to.size()) throw std::invalid_argument("rotation_taking: dimension mismatch");
    if (from.size() == 2) return rotation_2d(std::atan2(to[1], to[0]) - std::atan2(from[1], from[0]));
    if (from.size() == 3) {
        const Eigen::Matrix3d r =
            Eigen::Quaterniond::FromTwoVectors(Eigen::Vector3d(from), Eigen::Vector3d(to)).toRotationMatrix();
        return r;
    }
    throw std::invalid_argument("rotation_taking: unsupported dimension");
}

double cosine_transform(int n, HarmonicIndex idx, const Vector& u, const SphereQuadrature& q)
{
    if (q.dimension != n || u.size() != n) throw std::invalid_argument("dimension mismatch");
    require_resolution(q, idx.order);
    const int flat = harmonic_offset(n, idx.order) + idx.index - 1;
    const Vector axis = u.normalized();

    if (n == 2) {
        // Gauss-Legendre in the angle on each half circle; the integrand is analytic there.
        const double base = std::atan2(axis[1], axis[0]);
        const auto [t, w] = gauss_legendre(idx.order + 32, -0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
        double sum = 0.0;
        for (Eigen::Index k = 0; k < t.size(); ++k)
            for (double half : {0.0, std::numbers::pi}) {
                const double phi = base + half + t[k];
                const Vector v = Eigen::Vector2d(std::cos(phi), std::sin(phi));
                sum += w[k] * std::abs(std::cos(t[k])) * eval_harmonics_upto<double>(2, idx.order, v)[flat];
            }
        return sum;
    }

    // The rule is built from Gauss-Legendre nodes in z on each hemisphere, so |z| is
    // a polynomial on every piece once the polar axis is moved onto u.
    const Matrix r = rotation_taking(Vector::Unit(3, 2), axis);
    const Matrix nodes = r * q.nodes;
    double sum = 0.0;
    for (Eigen::Index k = 0; k < q.size(); ++k)
        sum += q.weights[k] * std::abs(q.nodes(2, k)) * eval_harmonics_upto<double>(3, idx.order, Vector(nodes.col(k)))[flat];
    return sum;
}

double cosine_multiplier(int n, int m, const SphereQuadrature& q)
{
    require_dimension(n);
    require_resolution(q, m);
    if (m % 2 == 1) return 0.0;

    // n = 2: Y_{m,1} = cos(mφ)/√π;  n = 3: the zonal harmonic.
    const HarmonicIndex idx{m, n == 2 ? 1 : m + 1};
    std::vector<Vector> candidates;
    if (n == 2) {
        for (double phi : {0.0, 0.37 / (m + 1), 2.0 * std::numbers::pi / std::max(m, 1), 2.5})
            candidates.push_back(Eigen::Vector2d(std::cos(phi), std::sin(phi)));
    } else {
        candidates = {Eigen::Vector3d::UnitZ(), Eigen::Vector3d::UnitX(), Eigen::Vector3d(1, 2, 3).normalized(),
                      Eigen::Vector3d(0.3, 0.0, 1.0).normalized()};
    }

    std::vector<double> estimates;
    for (const Vector& u : candidates) {
        const double y = eval_harmonic(n, idx, u);
        if (std::abs(y) < 0.05) continue;
        estimates.push_back(cosine_transform(n, idx, u, q) / y);
    }
    const auto [lo, hi] = std::minmax_element(estimates.begin(), estimates.end());
    if (*hi - *lo > 1e-8 * std::max(1.0, std::abs(estimates.front())))
        throw QuadratureError("cosine multiplier estimates disagree by " + std::to_string(*hi - *lo)
                              + "; refine the sphere quadrature");
    return estimates.front();
}

ConvexBody embed_2d_in_3d(const ConvexBody& planar)
{
    if (planar.dimension() != 2) throw std::invalid_argument("embed_2d_in_3d expects a planar body");
    Matrix inject = Matrix::Zero(3, 2);
    inject(0, 0) = 1.0;
    inject(1, 1) = 1.0;
    return ConvexBody::linear_image(inject, planar);
}

} // namespace univex
