#pragma once

#include "univex/analysis.hpp"
#include "univex/bodies.hpp"
#include "univex/harmonics.hpp"
#include "univex/sphere_quadrature.hpp"

#include <memory>
#include <vector>

namespace univex {

/// Which orders a generator must carry.
///  universal: every order 0..m_max.
///  central:   every even order; order 1 is used only when the generator's
///             Steiner point is off the origin, odd orders >= 3 never.
enum class ProfileMode { universal, central };

/// Per-order harmonic data of a generator K: c_{mj} = (h_K, Y_{mj}) and the
/// selected index j(m) maximizing |c_{mj}|.
struct GeneratorProfile {
    BodyPtr generator;
    int dimension = 2;
    int m_max = 0;
    double threshold = kDefaultThreshold;
    ProfileMode mode = ProfileMode::universal;
    std::vector<Vector> coefficients;  // c_m, m = 0..m_max
    std::vector<int> selected;         // j(m), 1-based; 0 when the order is not usable
    std::vector<double> conditioning;  // |c_{m j(m)}|, 0 when unusable

    bool has_order(int m) const { return m >= 0 && m <= m_max && selected[static_cast<std::size_t>(m)] != 0; }
};

/// A required order has every |c_{mj}| <= threshold.
class GeneratorError : public std::invalid_argument {
public:
    GeneratorError(int order, const std::string& message) : std::invalid_argument(message), order_(order) {}
    int order() const { return order_; }

private:
    int order_;
};

GeneratorProfile profile_generator(const ConvexBody& generator, int m_max, double threshold,
                                   const SphereQuadrature& q, ProfileMode mode = ProfileMode::universal);

/// g(θ) = Σ_m N(n,m) Σ_i b^m_i t^m_{i j(m)}(θ), so that ∫ h_{θK} g dν = h_L.
///
/// n = 3: b^m_i = a_{mi} / c_{m j(m)}.
/// n = 2: the order-m block is a complex number (cos, sin parts) and the real
/// coefficient formula only holds when the generator's other coefficient
/// vanishes; b^m is built from q = (a₁ + i a₂)/(c₁ + i c₂) instead.
class RotationDensity {
public:
    struct Term {
        int order = 0;
        int column = 1;  // j(m)
        Vector weights;  // b^m_i
    };

    RotationDensity(int dimension, std::vector<Term> terms);

    int dimension() const { return dimension_; }
    const std::vector<Term>& terms() const { return terms_; }
    double operator()(const Matrix& rotation) const;

private:
    int dimension_;
    std::vector<Term> terms_;
    std::shared_ptr<const RotationRepresentation> representation_;
};

RotationDensity synthesize_g(const GeneratorProfile& profile, const HarmonicExpansion& target);

struct RotationNode {
    Vector parameters;  // angle or ZYZ Euler angles
    Matrix rotation;
    double quadrature_weight = 0.0;
    double density = 0.0;  // g(θ_r)
};

/// L + T1 ≈ T2 with T1, T2 non-negative combinations of rotated copies of the generator.
struct DecompositionResult {
    ConvexBody t1;
    ConvexBody t2;
    HarmonicExpansion target;
    std::vector<RotationNode> nodes;
    double residual_sup = 0.0;
    double residual_l2 = 0.0;
    int rotation_count = 0;
    double g_condition = 0.0;
};

struct Residuals {
    double sup = 0.0;
    double l2 = 0.0;
};

/// Thrown by require_residual when a decomposition misses its tolerance.
class ToleranceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Σ_m N(n,m) Σ_i |a_{mi}| / |c_m|, with |c_m| = |c_{m j(m)}| (n = 3) or ‖c_m‖ (n = 2).
double g_condition(const GeneratorProfile& profile, const HarmonicExpansion& target);

DecompositionResult decompose(const GeneratorProfile& profile, const HarmonicExpansion& target,
                              const RotationQuadrature& rq, const SphereQuadrature& test_grid);

/// sup and L2 norms of h_L + h_{T1} - h_{T2} over the grid nodes.
Residuals residual_report(const DecompositionResult& result, const ConvexBody& target_body, const SphereQuadrature& grid);

void require_residual(const DecompositionResult& result, double sup_tolerance);

/// Discrete Haar integral Σ_r w_r h_{θ_r K}(u) t^m_{ij}(θ_r) compared on the grid with
///   stated:    N(n,m)⁻¹ (h_K, Y_{mj}) Y_{mi}(u)
///   corrected: ½[(h_K, Y_{mj}) Y_{mi}(u) + (h_K, JY_{mj}) (JY_{mi})(u)] for n = 2, m >= 1,
///              J the quarter-period rotation cos mφ ↦ sin mφ ↦ -cos mφ; equal to stated otherwise.
/// Errors are maxima over the grid and over all (i, j).
struct Form1Check {
    double stated_error = 0.0;
    double corrected_error = 0.0;
    double scale = 0.0;  // max |(h_K, Y_{mj}) Y_{mi}(u)| / N(n,m)
};

Form1Check check_form1(const ConvexBody& body, int m, const RotationQuadrature& rq, const Matrix& grid,
                       const SphereQuadrature& q);

} // namespace univex
