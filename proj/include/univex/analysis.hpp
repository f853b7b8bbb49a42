#pragma once

#include "univex/bodies.hpp"
#include "univex/harmonics.hpp"
#include "univex/sphere_quadrature.hpp"

#include <string>
#include <vector>

namespace univex {

/// Projections of order m require a sphere rule exact to degree 2m + kProjectionHeadroom.
inline constexpr int kProjectionHeadroom = 8;
inline constexpr double kDefaultThreshold = 1e-8;
inline constexpr int kDefaultMaxOrder = 12;

/// Coefficients (h_K, Y_{mj}), j = 1..N(n, m). Throws QuadratureError when q is too coarse.
Vector project(const ConvexBody& body, int m, const SphereQuadrature& q);

/// All projections of order <= m_max from a single pass over the nodes.
HarmonicExpansion expand(const ConvexBody& body, int m_max, const SphereQuadrature& q);
/// Same, for function values already sampled at the nodes of q.
HarmonicExpansion expand_values(const Vector& values, int m_max, const SphereQuadrature& q);

/// b(K) = (2/ω_n) ∫ h_K dσ.
double mean_width(const ConvexBody& body, const SphereQuadrature& q);
/// s(K) = (n/ω_n) ∫ h_K(u) u dσ(u).
Vector steiner_point(const ConvexBody& body, const SphereQuadrature& q);

/// Numerical witness of (central) universality up to order m_max.
///
/// Verdicts are pure functions of the norms and the threshold: a body is
/// reported universal when every norm of order <= m_max exceeds the threshold,
/// centrally universal when every even-order norm does.
struct UniversalityCertificate {
    std::string body_id;
    int m_max = 0;
    std::vector<double> norms;  // ‖π_m h_K‖₂ for m = 0..m_max
    double threshold = kDefaultThreshold;
    bool universal = false;
    bool centrally_universal = false;

    /// Orders whose norm is <= threshold (even orders only when central is set).
    std::vector<int> failing_orders(bool central = false) const;
};

UniversalityCertificate certificate_from_norms(std::string body_id, std::vector<double> norms, double threshold);
UniversalityCertificate certify(const ConvexBody& body, int m_max, double threshold, const SphereQuadrature& q,
                                std::string body_id = {});

/// True when all odd orders 3 <= m <= m_max have norm <= threshold.
bool odd_orders_vanish(const UniversalityCertificate& cert);

/// ∫ |⟨u, v⟩| Y_{mj}(v) dσ(v), integrated piecewise on the two sides of the kink
/// set {v : ⟨u, v⟩ = 0}: Gauss-Legendre in the angle for n = 2, q rotated to put
/// its polar axis on u for n = 3.
double cosine_transform(int n, HarmonicIndex idx, const Vector& u, const SphereQuadrature& q);

/// Multiplier a_m of the cosine transform on degree-m harmonics. Zero for odd m.
/// Throws QuadratureError when estimates at different directions disagree by more than 1e-8.
double cosine_multiplier(int n, int m, const SphereQuadrature& q);

/// The planar body placed in the x₁x₂-plane of R³.
ConvexBody embed_2d_in_3d(const ConvexBody& planar);

/// Rotation R with R·from = to (unit vectors, n = 2 or 3).
Matrix rotation_taking(const Vector& from, const Vector& to);

} // namespace univex
