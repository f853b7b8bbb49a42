#pragma once

#include "univex/harmonics.hpp"
#include "univex/sphere_quadrature.hpp"
#include "univex/types.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace univex {

class ConvexBody;
using BodyPtr = std::shared_ptr<const ConvexBody>;

struct Polytope {
    Matrix vertices;  // dimension x count
};

struct Ball {
    Vector center;
    double radius = 1.0;
};

/// {x : xᵀ M⁻¹ x <= 1}, so h(u) = sqrt(uᵀ M u).
struct Ellipsoid {
    Matrix shape;
};

struct Segment {
    Vector first;
    Vector second;
};

/// h(u) = constant + Σ a_{mj} Y_{mj}(u) on the sphere, extended 1-homogeneously.
struct HarmonicBody {
    double constant = 0.0;
    HarmonicExpansion terms;
};

struct MinkowskiPart {
    double weight = 1.0;
    Matrix rotation;
    BodyPtr body;
};

/// Σ weight_k · rotation_k · body_k.
struct MinkowskiCombination {
    int dimension = 2;
    std::vector<MinkowskiPart> parts;
};

/// A·base. Square maps must be invertible; 3x2 (planar embedding) and 2x3
/// (shadow on a plane) maps must have full rank.
struct LinearImage {
    Matrix map;
    BodyPtr base;
};

/// Immutable description of a convex body in R^2 or R^3.
class ConvexBody {
public:
    using Variant = std::variant<Polytope, Ball, Ellipsoid, Segment, HarmonicBody, MinkowskiCombination, LinearImage>;

    static ConvexBody polytope(Matrix vertices);
    static ConvexBody point(Vector p);
    static ConvexBody ball(Vector center, double radius);
    static ConvexBody ellipsoid(Matrix shape);
    static ConvexBody segment(Vector first, Vector second);
    /// Validates sublinearity of the support function on >= 10^4 direction pairs;
    /// throws PreconditionError when the function is not a support function.
    static ConvexBody harmonic(double constant, HarmonicExpansion terms);
    static ConvexBody minkowski(int dimension, std::vector<MinkowskiPart> parts);
    static ConvexBody linear_image(Matrix map, ConvexBody base);

    int dimension() const { return dimension_; }
    const Variant& variant() const { return value_; }
    std::string kind() const;

    friend bool operator==(const ConvexBody& a, const ConvexBody& b);

private:
    ConvexBody(int dimension, Variant value) : dimension_(dimension), value_(std::move(value)) {}

    int dimension_;
    Variant value_;
};

/// h(K, x), 1-homogeneous in x (x need not be a unit vector).
double support(const ConvexBody& body, const Vector& x);
/// h(K, ·) at each column of directions.
Vector support(const ConvexBody& body, const Matrix& directions);

/// h(AK, u) = h(K, Aᵀu). Throws std::invalid_argument for singular A.
double linear_image_support(const ConvexBody& body, const Matrix& map, const Vector& u);

ConvexBody rotated(const ConvexBody& body, const Matrix& rotation);
ConvexBody translated(const ConvexBody& body, const Vector& shift);
ConvexBody scaled(const ConvexBody& body, double factor);
ConvexBody minkowski_sum(const ConvexBody& a, const ConvexBody& b);

/// Largest violation of h(u + v) <= h(u) + h(v) over a deterministic set of
/// direction pairs (>= 10^4 pairs). Non-positive means no violation was found.
double sublinearity_violation(const ConvexBody& body, int pair_count = 10000);

/// HarmonicBody c + Y with c the smallest of {1, 2, 4, 8}·max|Y| whose support
/// function passes the sublinearity check. Throws PreconditionError if none does.
ConvexBody harmonic_body_with_min_constant(const HarmonicExpansion& terms);

// ---------------------------------------------------------------------------
// Star bodies

struct StarBall {
    Vector center;
    double radius = 1.0;
};

struct StarEllipsoid {
    Matrix inverse_shape;  // M⁻¹
};

/// Origin-interior polytope as facet inequalities ⟨normal_i, x⟩ <= offset_i, offset_i > 0.
struct StarPolytope {
    Matrix normals;  // dimension x facet count
    Vector offsets;
};

struct StarLinearImage;

/// Star body with strictly positive radial function ρ(K, u) = max{λ >= 0 : λu ∈ K}.
class StarBody {
public:
    using Variant = std::variant<StarBall, StarEllipsoid, StarPolytope, std::shared_ptr<const StarLinearImage>>;

    /// Balls and polytopes must contain the origin in their interior.
    static StarBody from_convex(const ConvexBody& body);
    static StarBody linear_image(Matrix map, StarBody base);

    int dimension() const { return dimension_; }
    const Variant& variant() const { return value_; }

private:
    StarBody(int dimension, Variant value) : dimension_(dimension), value_(std::move(value)) {}

    int dimension_;
    Variant value_;
};

struct StarLinearImage {
    Matrix map;
    Matrix inverse;
    StarBody base;
};

/// ρ(K, x), homogeneous of degree -1.
double radial(const StarBody& body, const Vector& x);

/// Ṽ₋₁(K, L) = (1/n) ∫ ρ(K,u)^{n+1} ρ(L,u)^{-1} dσ(u).
double dual_mixed_volume_minus1(const StarBody& k, const StarBody& l, const SphereQuadrature& q);

struct Lemma2Sides {
    double lhs = 0.0;
    double rhs = 0.0;
    /// ∫ |h(K, Av)| |Y_{mj}(v)| dσ(v): the magnitude against which |lhs - rhs| is judged.
    double scale = 0.0;
};

/// lhs = ∫ h(K, Av) Y̌_{mj}(v) dσ(v),
/// rhs = |det A|⁻¹ ∫ h(K, v) Y̌_{mj}(A⁻¹v) dσ(v), with Y̌(x) = ‖x‖^{-(n+1)} Y(x/‖x‖).
Lemma2Sides verify_lemma2(const ConvexBody& body, int m, int j, const Matrix& map, const SphereQuadrature& q);

} // namespace univex
