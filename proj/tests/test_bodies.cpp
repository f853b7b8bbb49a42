#include "common.hpp"

#include "univex/bodies.hpp"

#include <doctest.h>

using namespace univex;
using testing::circle_grid;
using testing::fixture;
using testing::random_map;
using testing::random_rotation;
using testing::random_unit;

namespace {

Matrix polygon(std::initializer_list<std::pair<double, double>> pts)
{
    Matrix v(2, static_cast<Eigen::Index>(pts.size()));
    Eigen::Index k = 0;
    for (auto [x, y] : pts) v.col(k++) << x, y;
    return v;
}

double cross(const Vector& a, const Vector& b) { return a[0] * b[1] - a[1] * b[0]; }

// Distance from x to a convex polygon with counter-clockwise vertices.
double distance_to_polygon(const Vector& x, const Matrix& ccw)
{
    const Eigen::Index k = ccw.cols();
    bool inside = true;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < k; ++i) {
        const Vector a = ccw.col(i), b = ccw.col((i + 1) % k);
        if (cross(b - a, x - a) < 0) inside = false;
        const double t = std::clamp((x - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
        best = std::min(best, (a + t * (b - a) - x).norm());
    }
    return inside ? 0.0 : best;
}

double hausdorff(const Matrix& p, const Matrix& q)
{
    double d = 0.0;
    for (Eigen::Index i = 0; i < p.cols(); ++i) d = std::max(d, distance_to_polygon(p.col(i), q));
    for (Eigen::Index i = 0; i < q.cols(); ++i) d = std::max(d, distance_to_polygon(q.col(i), p));
    return d;
}

// Radial function of an origin-interior convex polygon by ray/edge intersection.
double radial_oracle(const Matrix& ccw, const Vector& u)
{
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ccw.cols(); ++i) {
        const Vector a = ccw.col(i), e = ccw.col((i + 1) % ccw.cols()) - a;
        const double den = cross(u, e);
        if (std::abs(den) < 1e-15) continue;
        const double t = cross(a, e) / den;  // ray parameter
        const double s = cross(a, u) / den;  // edge parameter
        if (t > 0 && s >= -1e-12 && s <= 1 + 1e-12) best = std::min(best, t);
    }
    return best;
}

} // namespace

TEST_CASE("support examples")
{
    const auto seg = fixture("segment");
    for (double phi : {0.0, 0.3, 1.7, 3.0, 4.4}) {
        Vector u(2);
        u << std::cos(phi), std::sin(phi);
        CHECK(support(seg, u) == doctest::Approx(std::abs(std::cos(phi))).epsilon(1e-15));
    }
    Vector c(3);
    c << 0.2, -0.4, 1.0;
    const auto ball = ConvexBody::ball(c, 1.5);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 10; ++k) {
        const Vector u = random_unit(rng, 3);
        CHECK(support(ball, u) == doctest::Approx(1.5 + c.dot(u)).epsilon(1e-14));
        CHECK(support(ball, Vector(3.0 * u)) == doctest::Approx(3.0 * (1.5 + c.dot(u))).epsilon(1e-14));
    }
    Matrix shape(2, 2);
    shape << 2.0, 0.3, 0.3, 0.5;
    const auto ell = ConvexBody::ellipsoid(shape);
    const Vector u = random_unit(rng, 2);
    CHECK(support(ell, u) == doctest::Approx(std::sqrt(u.dot(shape * u))).epsilon(1e-15));
}

TEST_CASE("batched and pointwise support agree")
{
    const Matrix grid = circle_grid(97, 0.05);
    for (const char* name : {"triangle", "ball", "constant_width", "segment", "shifted_square", "even_target"}) {
        const auto body = fixture(name);
        const Vector batch = support(body, grid);
        for (Eigen::Index k = 0; k < grid.cols(); ++k) CHECK(batch[k] == doctest::Approx(support(body, Vector(grid.col(k)))).epsilon(1e-13));
    }
}

TEST_CASE("Minkowski sums match the vertex-sum oracle")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        for (int n : {2, 3}) {
            Matrix p(n, 6), q(n, 5);
            for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = uni(rng);
            for (Eigen::Index i = 0; i < q.size(); ++i) q.data()[i] = uni(rng);
            Matrix sums(n, p.cols() * q.cols());
            for (Eigen::Index i = 0; i < p.cols(); ++i)
                for (Eigen::Index j = 0; j < q.cols(); ++j) sums.col(i * q.cols() + j) = p.col(i) + q.col(j);
            const auto combined = minkowski_sum(ConvexBody::polytope(p), ConvexBody::polytope(q));
            const auto oracle = ConvexBody::polytope(sums);
            for (int k = 0; k < 50; ++k) {
                const Vector u = random_unit(rng, n);
                CHECK(std::abs(support(combined, u) - support(oracle, u)) < 1e-12);
            }
        }
    }
}

TEST_CASE("weighted rotated combination equals the weighted sum of rotated supports")
{
    std::mt19937_64 rng(23);
    const auto tri = std::make_shared<const ConvexBody>(fixture("tetrahedron"));
    const Matrix r1 = random_rotation(rng, 3), r2 = random_rotation(rng, 3);
    const auto comb = ConvexBody::minkowski(3, {{0.7, r1, tri}, {1.9, r2, tri}});
    for (int k = 0; k < 30; ++k) {
        const Vector u = random_unit(rng, 3);
        const double expected = 0.7 * support(*tri, Vector(r1.transpose() * u)) + 1.9 * support(*tri, Vector(r2.transpose() * u));
        CHECK(support(comb, u) == doctest::Approx(expected).epsilon(1e-14));
    }
    CHECK_THROWS_AS(ConvexBody::minkowski(3, {{-1.0, r1, tri}}), std::invalid_argument);
}

TEST_CASE("linear_image_support")
{
    const auto disc = ConvexBody::ball(Vector::Zero(2), 1.0);
    const Matrix grid = circle_grid(40, 0.01);
    Matrix a(2, 2);
    a << 1.0, 0.0, 0.0, 0.6;
    const auto tri = fixture("triangle");
    for (Eigen::Index k = 0; k < grid.cols(); ++k) {
        const Vector u = grid.col(k);
        CHECK(linear_image_support(tri, Matrix::Identity(2, 2), u) == doctest::Approx(support(tri, u)).epsilon(1e-15));
        CHECK(linear_image_support(disc, a, u) == doctest::Approx(std::sqrt(u[0] * u[0] + 0.36 * u[1] * u[1])).epsilon(1e-14));
        const Matrix r = rotation_2d(0.8);
        CHECK(linear_image_support(tri, r, u) == doctest::Approx(support(rotated(tri, r), u)).epsilon(1e-14));
        CHECK(linear_image_support(tri, r, u) == doctest::Approx(support(tri, Vector(r.transpose() * u))).epsilon(1e-14));
    }
    Matrix singular(2, 2);
    singular << 1, 2, 2, 4;
    CHECK_THROWS_AS(linear_image_support(tri, singular, grid.col(0)), std::invalid_argument);
    CHECK_THROWS_AS(ConvexBody::linear_image(singular, tri), std::invalid_argument);
}

TEST_CASE("rectangular maps: planar body in space and spatial shadow")
{
    Matrix embed = Matrix::Zero(3, 2);
    embed(0, 0) = embed(1, 1) = 1.0;
    const auto seg3 = ConvexBody::linear_image(embed, fixture("segment"));
    CHECK(seg3.dimension() == 3);
    std::mt19937_64 rng(4);
    for (int k = 0; k < 10; ++k) {
        const Vector u = random_unit(rng, 3);
        CHECK(support(seg3, u) == doctest::Approx(std::abs(u[0])).epsilon(1e-15));
    }
}

TEST_CASE("translation, scaling, equality")
{
    const auto tri = fixture("triangle");
    Vector t(2);
    t << 0.3, -2.0;
    const Vector u = circle_grid(7).col(3);
    CHECK(support(translated(tri, t), u) == doctest::Approx(support(tri, u) + t.dot(u)).epsilon(1e-14));
    CHECK(support(scaled(tri, 2.5), u) == doctest::Approx(2.5 * support(tri, u)).epsilon(1e-14));
    CHECK(tri == fixture("triangle"));
    CHECK_FALSE(tri == fixture("right_triangle"));
    CHECK(tri.kind() == "polytope");
    CHECK(fixture("shifted_square").kind() == "linear_image");
}

TEST_CASE("invalid bodies are rejected")
{
    Matrix not_spd(2, 2);
    not_spd << 1, 0, 0, -1;
    CHECK_THROWS_AS(ConvexBody::ellipsoid(not_spd), std::invalid_argument);
    Matrix asym(2, 2);
    asym << 1, 0.5, 0, 1;
    CHECK_THROWS_AS(ConvexBody::ellipsoid(asym), std::invalid_argument);
    CHECK_THROWS_AS(ConvexBody::ball(Vector::Zero(2), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ConvexBody::segment(Vector::Zero(2), Vector::Zero(3)), std::invalid_argument);
    CHECK_THROWS_AS(ConvexBody::polytope(Matrix(4, 3)), std::invalid_argument);
}

TEST_CASE("every fixture support function is sublinear on random pairs")
{
    std::mt19937_64 rng(99);
    for (const char* name : {"ball", "constant_width", "triangle", "right_triangle", "pentagon", "segment", "even_target",
                             "shifted_square", "tetrahedron", "spheroid"}) {
        const auto body = fixture(name);
        double worst = -1.0;
        for (int k = 0; k < 1000; ++k) {
            const Vector u = random_unit(rng, body.dimension()), v = random_unit(rng, body.dimension());
            worst = std::max(worst, support(body, Vector(u + v)) - support(body, u) - support(body, v));
        }
        INFO(name);
        CHECK(worst <= 1e-10);
        CHECK(sublinearity_violation(body, 2000) <= 1e-10);
    }
}

TEST_CASE("harmonic bodies: convexity check at construction")
{
    HarmonicExpansion y(2, 3);
    y.set_coefficient({3, 1}, 0.5 * std::sqrt(std::numbers::pi));  // 1 + 0.5 cos 3φ has h + h'' < 0 somewhere
    CHECK_THROWS_AS(ConvexBody::harmonic(1.0, y), PreconditionError);
    y.set_coefficient({3, 1}, 0.1 * std::sqrt(std::numbers::pi));
    CHECK_NOTHROW(ConvexBody::harmonic(1.0, y));

    HarmonicExpansion t(2, 4);
    t.set_coefficient({2, 1}, 0.3);
    t.set_coefficient({4, 1}, 0.05);
    const auto body = harmonic_body_with_min_constant(t);
    const double c = std::get<HarmonicBody>(body.variant()).constant;
    const double peak = t.evaluate(circle_grid(4096)).cwiseAbs().maxCoeff();
    for (double f : {1.0, 2.0, 4.0, 8.0})
        if (f * peak < c * (1.0 - 1e-6)) CHECK_THROWS_AS(ConvexBody::harmonic(f * peak, t), PreconditionError);
    CHECK(c / peak == doctest::Approx(std::round(c / peak)).epsilon(1e-6));
}

TEST_CASE("support sup-distance equals the Hausdorff distance of polygons")
{
    const Matrix p = polygon({{0, 0}, {2, 0}, {2.5, 1}, {1, 2}, {-0.5, 1}});
    const Matrix q = polygon({{0.3, -0.4}, {1.8, 0.2}, {1.2, 2.4}, {-0.2, 0.8}});
    const auto kp = ConvexBody::polytope(p), kq = ConvexBody::polytope(q);
    // The sup of h_P - h_Q is attained at an edge normal or at a difference direction v_i - w_j.
    std::vector<Vector> candidates;
    const auto add_normals = [&](const Matrix& poly) {
        for (Eigen::Index i = 0; i < poly.cols(); ++i) {
            const Vector e = poly.col((i + 1) % poly.cols()) - poly.col(i);
            Vector nrm(2);
            nrm << e[1], -e[0];
            candidates.push_back(nrm.normalized());
        }
    };
    add_normals(p);
    add_normals(q);
    for (Eigen::Index i = 0; i < p.cols(); ++i)
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
            candidates.push_back((p.col(i) - q.col(j)).normalized());
            candidates.push_back((q.col(j) - p.col(i)).normalized());
        }
    double sup = 0.0;
    for (const auto& u : candidates) sup = std::max(sup, std::abs(support(kp, u) - support(kq, u)));
    CHECK(std::abs(sup - hausdorff(p, q)) < 1e-9);
}

TEST_CASE("radial functions")
{
    const auto ball = StarBody::from_convex(ConvexBody::ball(Vector::Zero(3), 2.0));
    std::mt19937_64 rng(31);
    const Vector u = random_unit(rng, 3);
    CHECK(radial(ball, u) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(radial(ball, Vector(4.0 * u)) == doctest::Approx(0.5).epsilon(1e-15));

    const Matrix pent = polygon({{0.21, 0.03}, {0.09, 0.27}, {-0.24, 0.17}, {-0.2, -0.19}, {0.12, -0.31}});
    const auto star = StarBody::from_convex(ConvexBody::polytope(pent));
    const Matrix grid = circle_grid(73, 0.02);
    for (Eigen::Index k = 0; k < grid.cols(); ++k)
        CHECK(radial(star, Vector(grid.col(k))) == doctest::Approx(radial_oracle(pent, grid.col(k))).epsilon(1e-12));

    const Matrix a = random_map(rng, 2);
    const auto image = StarBody::linear_image(a, star);
    for (Eigen::Index k = 0; k < grid.cols(); ++k) {
        const Vector v = grid.col(k);
        CHECK(radial(image, Vector(a * v)) == doctest::Approx(radial(star, v)).epsilon(1e-10));
    }
    CHECK_THROWS(StarBody::from_convex(fixture("triangle")));  // origin on the boundary
}

TEST_CASE("dual mixed volume")
{
    for (int n : {2, 3}) {
        const auto q = build_sphere_quadrature(n, 64);
        const auto ball = StarBody::from_convex(ConvexBody::ball(Vector::Zero(n), 1.0));
        CHECK(dual_mixed_volume_minus1(ball, ball, q) == doctest::Approx(sphere_measure(n) / n).epsilon(1e-14));
    }
    std::mt19937_64 rng(77);
    for (int n : {2, 3}) {
        const auto q = build_sphere_quadrature(n, n == 2 ? 8191 : 511);
        for (int trial = 0; trial < 4; ++trial) {
            const Matrix mk = random_map(rng, n), ml = random_map(rng, n);
            const auto k = StarBody::from_convex(ConvexBody::ellipsoid(Matrix(mk * mk.transpose())));
            const auto l = StarBody::from_convex(ConvexBody::ellipsoid(Matrix(ml * ml.transpose())));
            const Matrix a = random_map(rng, n);
            const double base = dual_mixed_volume_minus1(k, l, q);
            const double image = dual_mixed_volume_minus1(StarBody::linear_image(a, k), StarBody::linear_image(a, l), q);
            CHECK(std::abs(image - std::abs(a.determinant()) * base) <= 1e-6 * std::abs(image));
        }
    }
}

TEST_CASE("linear-map transformation identity for support integrals")
{
    const auto q2 = build_sphere_quadrature(2, 65535);
    const auto pent = fixture("pentagon");
    SUBCASE("identity map gives equal sides")
    {
        const auto s = verify_lemma2(pent, 3, 1, Matrix::Identity(2, 2), q2);
        CHECK(s.lhs == doctest::Approx(s.rhs).epsilon(1e-14));
    }
    SUBCASE("centred ball has no higher-order component")
    {
        const auto s = verify_lemma2(ConvexBody::ball(Vector::Zero(2), 1.0), 2, 1, Matrix::Identity(2, 2), q2);
        CHECK(std::abs(s.lhs) < 1e-12);
    }
    SUBCASE("pentagon, m = 3, A = diag(1, 1.3)")
    {
        Matrix a = Matrix::Identity(2, 2);
        a(1, 1) = 1.3;
        for (int j : {1, 2}) {
            const auto s = verify_lemma2(pent, 3, j, a, q2);
            CHECK(std::abs(s.lhs - s.rhs) <= 1e-6);
        }
    }
    SUBCASE("3D tetrahedron")
    {
        std::mt19937_64 rng(8);
        const auto q3 = build_sphere_quadrature(3, 511);
        const Matrix a = random_map(rng, 3);
        const auto s = verify_lemma2(fixture("tetrahedron"), 4, 3, a, q3);
        CHECK(std::abs(s.lhs - s.rhs) <= 1e-6 * s.scale);
    }
    CHECK_THROWS_AS(verify_lemma2(pent, 1, 1, Matrix::Zero(2, 2), q2), std::invalid_argument);
}
