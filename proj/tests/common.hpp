#pragma once

#include "univex/io.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace testing {

using univex::Matrix;
using univex::Vector;

inline univex::ConvexBody fixture(const std::string& name)
{
    return univex::io::read_body_file(std::string(UNIVEX_FIXTURES) + "/" + name + ".json").body;
}

/// Unit vectors at equally spaced angles, offset so no node falls on a polytope normal by accident.
inline Matrix circle_grid(int count, double offset = 0.0)
{
    Matrix g(2, count);
    for (int k = 0; k < count; ++k) {
        const double phi = offset + 2.0 * std::numbers::pi * k / count;
        g.col(k) << std::cos(phi), std::sin(phi);
    }
    return g;
}

inline Vector random_unit(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> normal;
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    return v.normalized();
}

inline Matrix random_rotation(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> normal;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
}

/// Random matrix with det in [lo, hi] and condition number at most about 3.
inline Matrix random_map(std::mt19937_64& rng, int n, double lo = 0.5, double hi = 2.0)
{
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Vector s(n);
    for (int i = 0; i < n; ++i) s[i] = 0.7 + 1.3 * uni(rng);
    const double det = lo + (hi - lo) * uni(rng);
    s *= std::pow(det / s.prod(), 1.0 / n);
    return random_rotation(rng, n) * s.asDiagonal() * random_rotation(rng, n);
}

} // namespace testing
