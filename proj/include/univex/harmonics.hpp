#pragma once

#include "univex/sphere_quadrature.hpp"
#include "univex/types.hpp"

#include <cmath>
#include <iosfwd>
#include <numbers>
#include <vector>

namespace univex {

// Basis convention (fixed; coefficient files depend on it).
//
// n = 2:  Y_{0,1} = 1/sqrt(2π);  Y_{m,1} = cos(mφ)/sqrt(π),  Y_{m,2} = sin(mφ)/sqrt(π).
// n = 3:  Y_{m,j} with k = j - 1 - m in [-m, m]:
//           k < 0   sqrt(2) N_m^{|k|} P_m^{|k|}(cos θ) sin(|k|φ)
//           k = 0   N_m^0 P_m(cos θ)
//           k > 0   sqrt(2) N_m^k P_m^k(cos θ) cos(kφ)
//         without the Condon-Shortley phase; so Y_{1,1..3} ∝ (y, z, x).

/// N(n, m), the dimension of the space of degree-m harmonics on S^{n-1}.
inline int harmonic_dimension(int n, int m)
{
    if (n == 2) return m == 0 ? 1 : 2;
    return 2 * m + 1;
}

/// Position of Y_{m,1} in the flat layout that stacks orders 0, 1, 2, ...
inline int harmonic_offset(int n, int m)
{
    if (n == 2) return m == 0 ? 0 : 2 * m - 1;
    return m * m;
}

/// Number of basis functions of order <= max_order.
inline int harmonic_count(int n, int max_order) { return harmonic_offset(n, max_order + 1); }

struct HarmonicIndex {
    int order = 0;
    int index = 1;  // 1-based, in 1..N(n, order)
};

/// All basis functions of order <= max_order at the unit vector u, flat layout.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eval_harmonics_upto(int n, int max_order,
                                                             const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u)
{
    using std::sqrt;
    const Scalar pi = std::numbers::pi_v<Scalar>;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(harmonic_count(n, max_order));

    if (n == 2) {
        const Scalar inv_sqrt_pi = Scalar(1) / sqrt(pi);
        out[0] = Scalar(1) / sqrt(Scalar(2) * pi);
        // (c + i s) = (x + i y)^m
        Scalar c = 1, s = 0;
        for (int m = 1; m <= max_order; ++m) {
            const Scalar cn = c * u[0] - s * u[1];
            s = c * u[1] + s * u[0];
            c = cn;
            out[2 * m - 1] = c * inv_sqrt_pi;
            out[2 * m] = s * inv_sqrt_pi;
        }
        return out;
    }

    // Normalized associated Legendre functions with the factor sin^k θ removed:
    // reduced(l, k) = N_l^k P_l^k(z) / sin^k θ, a polynomial in z.
    const Scalar z = u[2];
    const int stride = max_order + 1;
    std::vector<Scalar> reduced(static_cast<std::size_t>(stride * stride), Scalar(0));
    auto at = [&](int l, int k) -> Scalar& { return reduced[static_cast<std::size_t>(l * stride + k)]; };
    at(0, 0) = Scalar(1) / sqrt(Scalar(4) * pi);
    for (int k = 1; k <= max_order; ++k) at(k, k) = sqrt(Scalar(2 * k + 1) / Scalar(2 * k)) * at(k - 1, k - 1);
    for (int k = 0; k < max_order; ++k) at(k + 1, k) = sqrt(Scalar(2 * k + 3)) * z * at(k, k);
    for (int k = 0; k <= max_order; ++k) {
        for (int l = k + 2; l <= max_order; ++l) {
            const Scalar a = sqrt(Scalar(4 * l * l - 1) / Scalar(l * l - k * k));
            const Scalar b = sqrt(Scalar((l - 1) * (l - 1) - k * k) / Scalar(4 * (l - 1) * (l - 1) - 1));
            at(l, k) = a * (z * at(l - 1, k) - b * at(l - 2, k));
        }
    }
    // (x + i y)^k = sin^k θ e^{ikφ}
    std::vector<Scalar> re(static_cast<std::size_t>(stride)), im(static_cast<std::size_t>(stride));
    re[0] = 1;
    im[0] = 0;
    for (int k = 1; k <= max_order; ++k) {
        re[k] = re[k - 1] * u[0] - im[k - 1] * u[1];
        im[k] = re[k - 1] * u[1] + im[k - 1] * u[0];
    }
    const Scalar sqrt2 = sqrt(Scalar(2));
    for (int m = 0; m <= max_order; ++m) {
        const int centre = m * m + m;
        out[centre] = at(m, 0);
        for (int k = 1; k <= m; ++k) {
            out[centre + k] = sqrt2 * at(m, k) * re[k];
            out[centre - k] = sqrt2 * at(m, k) * im[k];
        }
    }
    return out;
}

/// Value of one basis function. Throws std::out_of_range for an invalid index.
double eval_harmonic(int n, HarmonicIndex idx, const Vector& u);

/// The N(n, m) basis functions of order m at u.
Vector eval_order(int n, int m, const Vector& u);

/// Basis values of order m at each column of directions: N(n, m) x count.
Matrix harmonic_block(int n, int m, const Matrix& directions);

/// Coefficients a_{mj} of a band-limited function Σ a_{mj} Y_{mj}.
class HarmonicExpansion {
public:
    HarmonicExpansion() = default;
    HarmonicExpansion(int dimension, int max_order);
    HarmonicExpansion(int dimension, std::vector<Vector> blocks);

    int dimension() const { return dimension_; }
    int max_order() const { return static_cast<int>(blocks_.size()) - 1; }

    const Vector& block(int m) const;
    Vector& block(int m);
    const std::vector<Vector>& blocks() const { return blocks_; }

    double coefficient(HarmonicIndex idx) const;
    void set_coefficient(HarmonicIndex idx, double value);

    /// ‖π_m f‖₂ = sqrt(Σ_j a_{mj}²), independent of the basis chosen in the order-m space.
    double order_norm(int m) const;

    double evaluate(const Vector& u) const;
    Vector evaluate(const Matrix& directions) const;

    /// Same dimension, orders above new_max_order dropped (or zero-padded).
    HarmonicExpansion truncated(int new_max_order) const;

    HarmonicExpansion& operator*=(double factor);
    friend HarmonicExpansion operator*(double factor, HarmonicExpansion e) { return e *= factor; }
    friend bool operator==(const HarmonicExpansion& a, const HarmonicExpansion& b);

private:
    int dimension_ = 2;
    std::vector<Vector> blocks_;
};

void require_rotation(const Matrix& rotation, int dimension);

/// Matrices t^m(θ) of the rotation action on degree-m harmonics,
/// (θY_{mj})(u) = Y_{mj}(θ⁻¹u) = Σ_i t^m_{ij}(θ) Y_{mi}(u).
///
/// Closed form for n = 2. For n = 3, entries are inner products computed with
/// a sphere rule exact to degree 2 * max_order, built once per instance.
class RotationRepresentation {
public:
    RotationRepresentation(int dimension, int max_order);

    int dimension() const { return dimension_; }
    int max_order() const { return max_order_; }

    Matrix matrix(int m, const Matrix& rotation) const;
    /// Column j (1-based) of t^m(θ).
    Vector column(int m, int j, const Matrix& rotation) const;
    /// t^0(θ), ..., t^{max_order}(θ).
    std::vector<Matrix> matrices(const Matrix& rotation) const;

private:
    Matrix rotated_basis(int m, const Matrix& rotation) const;

    int dimension_;
    int max_order_;
    SphereQuadrature quadrature_;
    Matrix weighted_basis_;  // harmonic_count x nodes, entries w_k Y_i(u_k)
};

Matrix rotation_matrix(int n, int m, const Matrix& rotation);

/// Expansion of θf given the expansion of f.
HarmonicExpansion rotate_expansion(const HarmonicExpansion& e, const Matrix& rotation);

/// Rows "m,j,a" in ascending (m, j), with a header line.
void write_coefficients_csv(std::ostream& out, const HarmonicExpansion& e);

} // namespace univex
