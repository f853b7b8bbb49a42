#pragma once

#include "univex/analysis.hpp"
#include "univex/bodies.hpp"
#include "univex/sphere_quadrature.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace univex {

/// axis_scale_1: A(λ) = diag(1, λ, ..., λ).
/// axis_scale_2: A(λ) = diag(1, 1, λ) (n = 3 only).
/// random_near_identity: A = Id + E with E entrywise uniform in [-ε, ε].
enum class ScaleFamily { axis_scale_1, axis_scale_2, random_near_identity };
enum class Parity { all, even };
enum class SearchGoal { universal, central };

std::string to_string(ScaleFamily family);
std::string to_string(Parity parity);
std::string to_string(SearchGoal goal);

Matrix axis_scale(int dimension, ScaleFamily family, double lambda);

/// f_{mj}(λ) = (h_{A(λ)K}, Y_{mj}). Throws std::invalid_argument for λ <= 0.
double f_mj(const ConvexBody& body, int m, int j, double lambda, ScaleFamily family, const SphereQuadrature& q);

struct PerturbationSample {
    double parameter = 0.0;  // λ for the axis families, attempt number for the random family
    Matrix matrix;
    bool rejected = false;   // det <= 0 or outside the ε-ball; no norms computed
    std::vector<double> norms;
};

struct PerturbationSearchReport {
    std::string body_id;
    ScaleFamily family = ScaleFamily::axis_scale_1;
    int m_max = 0;
    double threshold = kDefaultThreshold;
    double epsilon = 0.0;
    bool central = false;  // which orders were required
    std::vector<PerturbationSample> samples;
    std::optional<Matrix> winner;
    std::optional<double> winner_parameter;
    std::optional<UniversalityCertificate> certificate;
    double distance_to_identity = 0.0;
    /// Without a winner: failing orders of the sample that came closest.
    std::vector<int> failing_orders;

    bool found() const { return winner.has_value(); }
};

struct ScanOptions {
    int m_max = 8;
    Parity parity = Parity::even;
    double epsilon = 0.1;
    double upper = 2.0;  // the interval is (0, upper), upper > 1
    int sample_count = 64;
    double threshold = kDefaultThreshold;
    ScaleFamily family = ScaleFamily::axis_scale_1;
    /// Rotate K first so that its widest direction becomes the first axis.
    bool align = true;
    std::string body_id;
};

/// Samples λ at sample_count equispaced points of [1 - ε, 1 + ε] ∩ (0, upper) and
/// certifies A(λ)K at each. The winner is the passing λ nearest to 1, reported
/// as the matrix Rᵀ A(λ) R in the original coordinates (R the alignment rotation).
PerturbationSearchReport scan_lambda(const ConvexBody& body, const ScanOptions& options, const SphereQuadrature& q);

/// F_m(K, A) = ∫ h(AK, φ) e^{imφ} dφ over S¹. Throws std::invalid_argument for det A <= 0.
std::complex<double> fourier_moment(const ConvexBody& body, const Matrix& map, int m, const SphereQuadrature& q);

struct DerivativeCheck {
    std::complex<double> lhs;       // central difference of λ ↦ F_m(K, diag(1, λ)) at λ = 1
    std::complex<double> rhs;       // 2 F_m(K, Id) - bracket
    std::complex<double> bracket;   // ∫ h(K,ψ)[(3/2)e^{imψ} + ((3-m)/4)e^{i(m-2)ψ} + ((3+m)/4)e^{i(m+2)ψ}] dψ
    double error() const { return std::abs(lhs - rhs); }
};

/// Throws std::invalid_argument for step <= 0 or even m.
DerivativeCheck derivative_identity_check(const ConvexBody& body, int m, double step, const SphereQuadrature& q);

struct SearchOptions {
    int m_max = 8;
    double epsilon = 0.1;
    double threshold = kDefaultThreshold;
    int attempts = 100;
    std::uint64_t seed = 0;
    SearchGoal goal = SearchGoal::universal;
    std::string body_id;
};

/// Tries Id first, then Id + E with E uniform in [-ε, ε]^{n×n} from a seeded
/// mt19937_64. Draws with det <= 0 or ‖E‖₂ > ε are rejected and recorded.
/// Throws PreconditionError for a symmetric body under the universal goal and
/// for a body reduced to a point under the central goal.
PerturbationSearchReport find_universal_image(const ConvexBody& body, const SearchOptions& options,
                                              const SphereQuadrature& q);

/// Orthogonal projection of a body in R³ onto the plane spanned by two coordinate axes (0-based).
ConvexBody project_to_plane(const ConvexBody& body, int first_axis, int second_axis);

/// Non-symmetric pipeline in R³: make the shadow on the x₁x₂-plane universal with
/// some B, then scan diag(1, 1, λ) on diag(B, 1)K. The winner is A(λ)·diag(B, 1).
PerturbationSearchReport lift_from_plane(const ConvexBody& body, const SearchOptions& plane_search,
                                         const ScanOptions& scan, const SphereQuadrature& q2,
                                         const SphereQuadrature& q3);

} // namespace univex
