#include "univex/bodies.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace univex {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

bool same_shape_and_values(const Matrix& a, const Matrix& b)
{
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

void require_finite(const Matrix& m, const char* what)
{
    if (!m.allFinite()) throw std::invalid_argument(std::string(what) + " contains non-finite values");
}

double harmonic_support(const HarmonicBody& body, const Vector& x)
{
    const double r = x.norm();
    if (r == 0.0) return 0.0;
    return r * (body.constant + body.terms.evaluate(Vector(x / r)));
}

} // namespace

// ---------------------------------------------------------------------------
// Construction

ConvexBody ConvexBody::polytope(Matrix vertices)
{
    require_dimension(static_cast<int>(vertices.rows()));
    if (vertices.cols() < 1) throw std::invalid_argument("polytope needs at least one vertex");
    require_finite(vertices, "polytope vertices");
    const int n = static_cast<int>(vertices.rows());
    return ConvexBody(n, Polytope{std::move(vertices)});
}

ConvexBody ConvexBody::point(Vector p) { return polytope(Matrix(p)); }

ConvexBody ConvexBody::ball(Vector center, double radius)
{
    require_dimension(static_cast<int>(center.size()));
    require_finite(center, "ball center");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ball radius must be positive");
    const int n = static_cast<int>(center.size());
    return ConvexBody(n, Ball{std::move(center), radius});
}

ConvexBody ConvexBody::ellipsoid(Matrix shape)
{
    require_dimension(static_cast<int>(shape.rows()));
    if (shape.rows() != shape.cols()) throw std::invalid_argument("ellipsoid shape matrix must be square");
    require_finite(shape, "ellipsoid shape matrix");
    if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + shape.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("ellipsoid shape matrix must be symmetric");
    if (Eigen::LLT<Matrix>(shape).info() != Eigen::Success)
        throw std::invalid_argument("ellipsoid shape matrix must be positive definite");
    const int n = static_cast<int>(shape.rows());
    return ConvexBody(n, Ellipsoid{std::move(shape)});
}

ConvexBody ConvexBody::segment(Vector first, Vector second)
{
    require_dimension(static_cast<int>(first.size()));
    if (first.size() != second.size()) throw std::invalid_argument("segment endpoints differ in dimension");
    require_finite(first, "segment endpoint");
    require_finite(second, "segment endpoint");
    const int n = static_cast<int>(first.size());
    return ConvexBody(n, Segment{std::move(first), std::move(second)});
}

ConvexBody ConvexBody::harmonic(double constant, HarmonicExpansion terms)
{
    if (!std::isfinite(constant)) throw std::invalid_argument("harmonic body constant must be finite");
    const int n = terms.dimension();
    ConvexBody body(n, HarmonicBody{constant, std::move(terms)});
    const double violation = sublinearity_violation(body);
    if (violation > 1e-10 * (1.0 + std::abs(constant)))
        throw PreconditionError("harmonic body is not convex: sublinearity violated by "
                                + std::to_string(violation) + " (increase the constant)");
    return body;
}

ConvexBody ConvexBody::minkowski(int dimension, std::vector<MinkowskiPart> parts)
{
    require_dimension(dimension);
    if (parts.empty()) throw std::invalid_argument("Minkowski combination needs at least one part");
    for (auto& part : parts) {
        if (!part.body) throw std::invalid_argument("Minkowski part without body");
        if (part.body->dimension() != dimension) throw std::invalid_argument("Minkowski part dimension mismatch");
        if (!(part.weight >= 0.0) || !std::isfinite(part.weight))
            throw std::invalid_argument("Minkowski weights must be non-negative");
        if (part.rotation.size() == 0) part.rotation = Matrix::Identity(dimension, dimension);
        require_rotation(part.rotation, dimension);
    }
    return ConvexBody(dimension, MinkowskiCombination{dimension, std::move(parts)});
}

ConvexBody ConvexBody::linear_image(Matrix map, ConvexBody base)
{
    require_dimension(static_cast<int>(map.rows()));
    require_finite(map, "linear map");
    if (map.cols() != base.dimension()) throw std::invalid_argument("linear map columns must match body dimension");
    const Eigen::JacobiSVD<Matrix> svd(map);
    const Vector s = svd.singularValues();
    if (s.size() == 0 || s[s.size() - 1] <= 1e-12 * s[0])
        throw std::invalid_argument(map.rows() == map.cols() ? "linear map is singular"
                                                             : "linear map does not have full rank");
    const int n = static_cast<int>(map.rows());
    return ConvexBody(n, LinearImage{std::move(map), std::make_shared<const ConvexBody>(std::move(base))});
}

std::string ConvexBody::kind() const
{
    return std::visit(overloaded{
                          [](const Polytope&) { return std::string("polytope"); },
                          [](const Ball&) { return std::string("ball"); },
                          [](const Ellipsoid&) { return std::string("ellipsoid"); },
                          [](const Segment&) { return std::string("segment"); },
                          [](const HarmonicBody&) { return std::string("harmonic"); },
                          [](const MinkowskiCombination&) { return std::string("minkowski"); },
                          [](const LinearImage&) { return std::string("linear_image"); },
                      },
                      value_);
}

bool operator==(const ConvexBody& a, const ConvexBody& b)
{
    if (a.dimension_ != b.dimension_ || a.value_.index() != b.value_.index()) return false;
    return std::visit(
        overloaded{
            [&](const Polytope& p) { return same_shape_and_values(p.vertices, std::get<Polytope>(b.value_).vertices); },
            [&](const Ball& p) {
                const auto& q = std::get<Ball>(b.value_);
                return same_shape_and_values(p.center, q.center) && p.radius == q.radius;
            },
            [&](const Ellipsoid& p) { return same_shape_and_values(p.shape, std::get<Ellipsoid>(b.value_).shape); },
            [&](const Segment& p) {
                const auto& q = std::get<Segment>(b.value_);
                return same_shape_and_values(p.first, q.first) && same_shape_and_values(p.second, q.second);
            },
            [&](const HarmonicBody& p) {
                const auto& q = std::get<HarmonicBody>(b.value_);
                return p.constant == q.constant && p.terms == q.terms;
            },
            [&](const MinkowskiCombination& p) {
                const auto& q = std::get<MinkowskiCombination>(b.value_);
                if (p.parts.size() != q.parts.size()) return false;
                for (std::size_t i = 0; i < p.parts.size(); ++i) {
                    const auto& x = p.parts[i];
                    const auto& y = q.parts[i];
                    if (x.weight != y.weight || !same_shape_and_values(x.rotation, y.rotation) || !(*x.body == *y.body))
                        return false;
                }
                return true;
            },
            [&](const LinearImage& p) {
                const auto& q = std::get<LinearImage>(b.value_);
                return same_shape_and_values(p.map, q.map) && *p.base == *q.base;
            },
        },
        a.value_);
}

// ---------------------------------------------------------------------------
// Support functions

double support(const ConvexBody& body, const Vector& x)
{
    if (x.size() != body.dimension()) throw std::invalid_argument("direction dimension does not match body");
    return std::visit(overloaded{
                          [&](const Polytope& p) { return (p.vertices.transpose() * x).maxCoeff(); },
                          [&](const Ball& p) { return p.radius * x.norm() + p.center.dot(x); },
                          [&](const Ellipsoid& p) { return std::sqrt(std::max(0.0, x.dot(p.shape * x))); },
                          [&](const Segment& p) { return std::max(p.first.dot(x), p.second.dot(x)); },
                          [&](const HarmonicBody& p) { return harmonic_support(p, x); },
                          [&](const MinkowskiCombination& p) {
                              double sum = 0.0;
                              for (const auto& part : p.parts)
                                  sum += part.weight * support(*part.body, Vector(part.rotation.transpose() * x));
                              return sum;
                          },
                          [&](const LinearImage& p) { return support(*p.base, Vector(p.map.transpose() * x)); },
                      },
                      body.variant());
}

Vector support(const ConvexBody& body, const Matrix& directions)
{
    if (directions.rows() != body.dimension()) throw std::invalid_argument("direction dimension does not match body");
    return std::visit(
        overloaded{
            [&](const Polytope& p) -> Vector {
                return (p.vertices.transpose() * directions).colwise().maxCoeff().transpose();
            },
            [&](const Ball& p) -> Vector {
                return p.radius * directions.colwise().norm().transpose() + directions.transpose() * p.center;
            },
            [&](const Ellipsoid& p) -> Vector {
                return directions.cwiseProduct(p.shape * directions).colwise().sum().transpose().cwiseMax(0.0).cwiseSqrt();
            },
            [&](const Segment& p) -> Vector {
                return (directions.transpose() * p.first).cwiseMax(directions.transpose() * p.second);
            },
            [&](const HarmonicBody& p) -> Vector {
                Vector out(directions.cols());
                for (Eigen::Index k = 0; k < directions.cols(); ++k) out[k] = harmonic_support(p, directions.col(k));
                return out;
            },
            [&](const MinkowskiCombination& p) -> Vector {
                Vector sum = Vector::Zero(directions.cols());
                for (const auto& part : p.parts)
                    if (part.weight != 0.0)
                        sum += part.weight * support(*part.body, Matrix(part.rotation.transpose() * directions));
                return sum;
            },
            [&](const LinearImage& p) -> Vector { return support(*p.base, Matrix(p.map.transpose() * directions)); },
        },
        body.variant());
}

double linear_image_support(const ConvexBody& body, const Matrix& map, const Vector& u)
{
    if (map.rows() != map.cols() || map.cols() != body.dimension())
        throw std::invalid_argument("linear map must be square and match the body dimension");
    if (std::abs(map.determinant()) <= 1e-14 * std::pow(map.norm(), static_cast<double>(map.rows())))
        throw std::invalid_argument("linear map is singular");
    return support(body, Vector(map.transpose() * u));
}

ConvexBody rotated(const ConvexBody& body, const Matrix& rotation)
{
    require_rotation(rotation, body.dimension());
    return ConvexBody::linear_image(rotation, body);
}

ConvexBody translated(const ConvexBody& body, const Vector& shift)
{
    return minkowski_sum(body, ConvexBody::point(shift));
}

ConvexBody scaled(const ConvexBody& body, double factor)
{
    const int n = body.dimension();
    return ConvexBody::minkowski(n, {MinkowskiPart{factor, Matrix::Identity(n, n), std::make_shared<const ConvexBody>(body)}});
}

ConvexBody minkowski_sum(const ConvexBody& a, const ConvexBody& b)
{
    const int n = a.dimension();
    return ConvexBody::minkowski(n, {MinkowskiPart{1.0, Matrix::Identity(n, n), std::make_shared<const ConvexBody>(a)},
                                     MinkowskiPart{1.0, Matrix::Identity(n, n), std::make_shared<const ConvexBody>(b)}});
}

double sublinearity_violation(const ConvexBody& body, int pair_count)
{
    const int n = body.dimension();
    double worst = -std::numeric_limits<double>::infinity();
    auto check = [&](const Vector& u, const Vector& v) {
        worst = std::max(worst, support(body, Vector(u + v)) - support(body, u) - support(body, v));
    };

    // Separations from 1e-3 rad (local convexity, h + h'' >= 0 in the plane)
    // up to nearly antipodal pairs.
    const int separations = 100;
    const int bases = std::max(1, (pair_count + separations - 1) / separations);
    auto separation = [&](int s) { return 1e-3 * std::pow(3.0 / 1e-3, s / double(separations - 1)); };

    if (n == 2) {
        for (int b = 0; b < bases; ++b) {
            const double phi = 2.0 * std::numbers::pi * (b + 0.5) / bases;
            for (int s = 0; s < separations; ++s) {
                const double psi = phi + separation(s);
                check(Eigen::Vector2d(std::cos(phi), std::sin(phi)), Eigen::Vector2d(std::cos(psi), std::sin(psi)));
            }
        }
        return worst;
    }

    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> gauss;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int b = 0; b < bases; ++b) {
        const double z = 1.0 - 2.0 * (b + 0.5) / bases;
        const double r = std::sqrt(1.0 - z * z);
        const Eigen::Vector3d u(r * std::cos(golden * b), r * std::sin(golden * b), z);
        for (int s = 0; s < separations; ++s) {
            Eigen::Vector3d w(gauss(rng), gauss(rng), gauss(rng));
            w -= w.dot(u) * u;
            w.normalize();
            const double d = separation(s);
            check(u, Vector(std::cos(d) * u + std::sin(d) * w));
        }
    }
    return worst;
}

ConvexBody harmonic_body_with_min_constant(const HarmonicExpansion& terms)
{
    const int n = terms.dimension();
    const SphereQuadrature grid = build_sphere_quadrature(n, n == 2 ? 4095 : 95);
    const double peak = terms.evaluate(grid.nodes).cwiseAbs().maxCoeff();
    if (!(peak > 0.0)) throw PreconditionError("harmonic terms vanish identically");
    for (double factor : {1.0, 2.0, 4.0, 8.0}) {
        try {
            return ConvexBody::harmonic(factor * peak, terms);
        } catch (const PreconditionError&) {
        }
    }
    throw PreconditionError("no constant in {1, 2, 4, 8} * max|Y| makes the harmonic body convex");
}

// ---------------------------------------------------------------------------
// Star bodies

namespace {

StarPolytope facets_of(const Matrix& vertices)
{
    const int n = static_cast<int>(vertices.rows());
    const Eigen::Index count = vertices.cols();
    const double tol = 1e-12 * (1.0 + vertices.cwiseAbs().maxCoeff());
    std::vector<Vector> normals;
    std::vector<double> offsets;

    auto consider = [&](Vector normal, double offset) {
        const double len = normal.norm();
        if (len <= tol) return;
        normal /= len;
        offset /= len;
        const Vector values = vertices.transpose() * normal;
        if ((values.array() <= offset + tol).all()) {
            normals.push_back(normal);
            offsets.push_back(offset);
        } else if ((values.array() >= offset - tol).all()) {
            normals.push_back(-normal);
            offsets.push_back(-offset);
        }
    };

    if (n == 2) {
        for (Eigen::Index i = 0; i < count; ++i)
            for (Eigen::Index j = i + 1; j < count; ++j) {
                const Vector d = vertices.col(j) - vertices.col(i);
                const Vector normal = Eigen::Vector2d(d[1], -d[0]);
                consider(normal, normal.dot(vertices.col(i)));
            }
    } else {
        for (Eigen::Index i = 0; i < count; ++i)
            for (Eigen::Index j = i + 1; j < count; ++j)
                for (Eigen::Index k = j + 1; k < count; ++k) {
                    const Eigen::Vector3d a = vertices.col(i), b = vertices.col(j), c = vertices.col(k);
                    const Vector normal = (b - a).cross(c - a);
                    consider(normal, normal.dot(a));
                }
    }

    StarPolytope out;
    out.normals.resize(n, static_cast<Eigen::Index>(normals.size()));
    out.offsets.resize(static_cast<Eigen::Index>(offsets.size()));
    for (std::size_t f = 0; f < normals.size(); ++f) {
        out.normals.col(static_cast<Eigen::Index>(f)) = normals[f];
        out.offsets[static_cast<Eigen::Index>(f)] = offsets[f];
    }
    if (normals.size() < static_cast<std::size_t>(n + 1) || (out.offsets.array() <= tol).any())
        throw PreconditionError("polytope must be full-dimensional with the origin in its interior");
    return out;
}

} // namespace

StarBody StarBody::from_convex(const ConvexBody& body)
{
    const int n = body.dimension();
    return std::visit(
        overloaded{
            [&](const Ball& b) -> StarBody {
                if (b.center.norm() >= b.radius) throw PreconditionError("ball must contain the origin in its interior");
                return StarBody(n, StarBall{b.center, b.radius});
            },
            [&](const Ellipsoid& e) -> StarBody { return StarBody(n, StarEllipsoid{e.shape.inverse()}); },
            [&](const Polytope& p) -> StarBody { return StarBody(n, facets_of(p.vertices)); },
            [&](const LinearImage& l) -> StarBody {
                if (l.map.rows() != l.map.cols()) throw PreconditionError("star bodies need a square linear map");
                return linear_image(l.map, from_convex(*l.base));
            },
            [&](const auto&) -> StarBody {
                throw PreconditionError("no closed-form radial function for a " + body.kind() + " body");
            },
        },
        body.variant());
}

StarBody StarBody::linear_image(Matrix map, StarBody base)
{
    if (map.rows() != base.dimension() || map.cols() != base.dimension())
        throw std::invalid_argument("linear map must be square and match the star body dimension");
    const Eigen::FullPivLU<Matrix> lu(map);
    if (!lu.isInvertible()) throw std::invalid_argument("linear map is singular");
    const int n = base.dimension();
    Matrix inverse = lu.inverse();
    return StarBody(n, std::make_shared<const StarLinearImage>(StarLinearImage{std::move(map), std::move(inverse), std::move(base)}));
}

double radial(const StarBody& body, const Vector& x)
{
    return std::visit(overloaded{
                          [&](const StarBall& b) {
                              const double r = x.norm();
                              const Vector u = x / r;
                              const double t = u.dot(b.center);
                              return (t + std::sqrt(t * t - b.center.squaredNorm() + b.radius * b.radius)) / r;
                          },
                          [&](const StarEllipsoid& e) { return 1.0 / std::sqrt(x.dot(e.inverse_shape * x)); },
                          [&](const StarPolytope& p) {
                              return 1.0 / (p.normals.transpose() * x).cwiseQuotient(p.offsets).maxCoeff();
                          },
                          [&](const std::shared_ptr<const StarLinearImage>& l) {
                              return radial(l->base, Vector(l->inverse * x));
                          },
                      },
                      body.variant());
}

double dual_mixed_volume_minus1(const StarBody& k, const StarBody& l, const SphereQuadrature& q)
{
    const int n = k.dimension();
    if (l.dimension() != n || q.dimension != n) throw std::invalid_argument("dimension mismatch");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const Vector u = q.nodes.col(i);
        const double rk = radial(k, u), rl = radial(l, u);
        if (!(rk > 0.0) || !(rl > 0.0))
            throw std::domain_error("radial function is not positive at a quadrature node");
        sum += q.weights[i] * std::pow(rk, n + 1) / rl;
    }
    return sum / n;
}

Lemma2Sides verify_lemma2(const ConvexBody& body, int m, int j, const Matrix& map, const SphereQuadrature& q)
{
    const int n = body.dimension();
    if (q.dimension != n || map.rows() != n || map.cols() != n) throw std::invalid_argument("dimension mismatch");
    const Eigen::FullPivLU<Matrix> lu(map);
    if (!lu.isInvertible()) throw std::invalid_argument("linear map is singular");
    const Matrix inverse = lu.inverse();
    const double det = std::abs(map.determinant());
    const int flat = harmonic_offset(n, m) + j - 1;
    if (j < 1 || j > harmonic_dimension(n, m)) throw std::out_of_range("harmonic index out of range");

    const Vector h_image = support(body, Matrix(map * q.nodes));
    const Vector h_base = support(body, q.nodes);
    Lemma2Sides sides;
    for (Eigen::Index k = 0; k < q.size(); ++k) {
        const double y = eval_harmonics_upto<double>(n, m, Vector(q.nodes.col(k)))[flat];
        const Vector x = inverse * q.nodes.col(k);
        const double r = x.norm();
        const double y_check = eval_harmonics_upto<double>(n, m, Vector(x / r))[flat] / std::pow(r, n + 1);
        sides.lhs += q.weights[k] * h_image[k] * y;
        sides.rhs += q.weights[k] * h_base[k] * y_check;
        sides.scale += q.weights[k] * std::abs(h_image[k] * y);
    }
    sides.rhs /= det;
    return sides;
}

} // namespace univex
