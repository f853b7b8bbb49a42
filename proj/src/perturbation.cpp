#include "univex/perturbation.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace univex {

namespace {

double operator_norm(const Matrix& m)
{
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

std::vector<double> order_norms(const ConvexBody& body, int m_max, const SphereQuadrature& q)
{
    const HarmonicExpansion e = expand(body, m_max, q);
    std::vector<double> norms;
    for (int m = 0; m <= m_max; ++m) norms.push_back(e.order_norm(m));
    return norms;
}

int failure_count(const std::vector<double>& norms, double threshold, bool central)
{
    int count = 0;
    for (std::size_t m = 0; m < norms.size(); ++m)
        if ((!central || m % 2 == 0) && !(norms[m] > threshold)) ++count;
    return count;
}

/// Direction maximizing h(u) + h(-u) over the nodes of q.
Vector widest_direction(const ConvexBody& body, const SphereQuadrature& q, double* width)
{
    const Vector w = support(body, q.nodes) + support(body, Matrix(-q.nodes));
    Eigen::Index best = 0;
    *width = w.maxCoeff(&best);
    return q.nodes.col(best);
}

bool looks_symmetric(const ConvexBody& body, int m_max, double threshold, const SphereQuadrature& q)
{
    return odd_orders_vanish(certify(body, std::max(m_max, 3), threshold, q));
}

/// Closest sample's failing orders; used when nothing passed.
void record_closest_failure(PerturbationSearchReport& report, double target_parameter)
{
    const PerturbationSample* closest = nullptr;
    int fewest = std::numeric_limits<int>::max();
    for (const auto& s : report.samples) {
        if (s.rejected) continue;
        const int f = failure_count(s.norms, report.threshold, report.central);
        if (f < fewest
            || (f == fewest && std::abs(s.parameter - target_parameter) < std::abs(closest->parameter - target_parameter))) {
            fewest = f;
            closest = &s;
        }
    }
    if (!closest) return;
    report.failing_orders = certificate_from_norms(report.body_id, closest->norms, report.threshold)
                                .failing_orders(report.central);
}

} // namespace

std::string to_string(ScaleFamily family)
{
    switch (family) {
    case ScaleFamily::axis_scale_1: return "axis_scale_1";
    case ScaleFamily::axis_scale_2: return "axis_scale_2";
    case ScaleFamily::random_near_identity: return "random_near_identity";
    }
    return "unknown";
}

std::string to_string(Parity parity) { return parity == Parity::even ? "even" : "all"; }
std::string to_string(SearchGoal goal) { return goal == SearchGoal::central ? "central" : "universal"; }

Matrix axis_scale(int dimension, ScaleFamily family, double lambda)
{
    require_dimension(dimension);
    if (!(lambda > 0.0)) throw std::invalid_argument("scale parameter must be positive, got " + std::to_string(lambda));
    Vector d = Vector::Ones(dimension);
    switch (family) {
    case ScaleFamily::axis_scale_1: d.tail(dimension - 1).setConstant(lambda); break;
    case ScaleFamily::axis_scale_2:
        if (dimension < 3) throw std::invalid_argument("axis_scale_2 needs dimension 3");
        d.tail(dimension - 2).setConstant(lambda);
        break;
    case ScaleFamily::random_near_identity: throw std::invalid_argument("random_near_identity is not an axis family");
    }
    return d.asDiagonal();
}

double f_mj(const ConvexBody& body, int m, int j, double lambda, ScaleFamily family, const SphereQuadrature& q)
{
    const ConvexBody image = ConvexBody::linear_image(axis_scale(body.dimension(), family, lambda), body);
    return project(image, m, q)[j - 1];
}

PerturbationSearchReport scan_lambda(const ConvexBody& body, const ScanOptions& options, const SphereQuadrature& q)
{
    const int n = body.dimension();
    if (!(options.upper > 1.0)) throw std::invalid_argument("interval bound a must exceed 1");
    if (!(options.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (options.sample_count < 1) throw std::invalid_argument("sample_count must be positive");

    double width = 0.0;
    const Vector widest = widest_direction(body, q, &width);
    if (options.parity == Parity::even) {
        if (!(width > 1e-12))
            throw PreconditionError("even-parity scan needs the shadow of K on the first axis to be a segment of "
                                    "positive length; K is a point");
        if (!looks_symmetric(body, options.m_max, options.threshold, q))
            throw PreconditionError("even-parity scan needs a symmetric body (odd orders >= 3 must vanish)");
    }
    Matrix align = Matrix::Identity(n, n);
    if (options.align && options.family == ScaleFamily::axis_scale_1 && width > 0.0)
        align = rotation_taking(widest, Vector::Unit(n, 0));

    PerturbationSearchReport report;
    report.body_id = options.body_id;
    report.family = options.family;
    report.m_max = options.m_max;
    report.threshold = options.threshold;
    report.epsilon = options.epsilon;
    report.central = options.parity == Parity::even;

    const double lo = 1.0 - options.epsilon;
    const double hi = 1.0 + options.epsilon;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < options.sample_count; ++k) {
        const double lambda = options.sample_count == 1 ? 1.0 : lo + (hi - lo) * k / (options.sample_count - 1);
        if (!(lambda > 0.0) || !(lambda < options.upper)) continue;
        const Matrix a = align.transpose() * axis_scale(n, options.family, lambda) * align;
        PerturbationSample sample{lambda, a, false, order_norms(ConvexBody::linear_image(a, body), options.m_max, q)};
        const bool passes = failure_count(sample.norms, options.threshold, report.central) == 0;
        if (passes && std::abs(lambda - 1.0) < best_gap) {
            best_gap = std::abs(lambda - 1.0);
            report.winner = a;
            report.winner_parameter = lambda;
        }
        report.samples.push_back(std::move(sample));
    }
    if (report.winner) {
        report.certificate = certify(ConvexBody::linear_image(*report.winner, body), options.m_max, options.threshold, q,
                                     options.body_id);
        report.distance_to_identity = operator_norm(*report.winner - Matrix::Identity(n, n));
    } else {
        record_closest_failure(report, 1.0);
    }
    return report;
}

std::complex<double> fourier_moment(const ConvexBody& body, const Matrix& map, int m, const SphereQuadrature& q)
{
    if (body.dimension() != 2 || q.dimension != 2) throw std::invalid_argument("F_m is defined for planar bodies");
    if (map.rows() != 2 || map.cols() != 2) throw std::invalid_argument("F_m needs a 2x2 matrix");
    if (!(map.determinant() > 0.0)) throw std::invalid_argument("F_m needs det A > 0");
    const Vector h = support(body, Matrix(map.transpose() * q.nodes));
    std::complex<double> sum = 0.0;
    for (Eigen::Index k = 0; k < q.size(); ++k) {
        const double phi = std::atan2(q.nodes(1, k), q.nodes(0, k));
        sum += q.weights[k] * h[k] * std::polar(1.0, m * phi);
    }
    return sum;
}

DerivativeCheck derivative_identity_check(const ConvexBody& body, int m, double step, const SphereQuadrature& q)
{
    if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    if (m < 1 || m % 2 == 0) throw std::invalid_argument("derivative identity is checked for odd m >= 1");
    const auto at = [&](double lambda) { return fourier_moment(body, axis_scale(2, ScaleFamily::axis_scale_1, lambda), m, q); };

    DerivativeCheck out;
    out.lhs = (at(1.0 + step) - at(1.0 - step)) / (2.0 * step);
    const Vector h = support(body, q.nodes);
    for (Eigen::Index k = 0; k < q.size(); ++k) {
        const double psi = std::atan2(q.nodes(1, k), q.nodes(0, k));
        const std::complex<double> kernel = 1.5 * std::polar(1.0, m * psi) + (3.0 - m) / 4.0 * std::polar(1.0, (m - 2) * psi)
                                            + (3.0 + m) / 4.0 * std::polar(1.0, (m + 2) * psi);
        out.bracket += q.weights[k] * h[k] * kernel;
    }
    // λ² prefactor of the substituted integral contributes 2 F_m(K, Id).
    out.rhs = 2.0 * at(1.0) - out.bracket;
    return out;
}

PerturbationSearchReport find_universal_image(const ConvexBody& body, const SearchOptions& options,
                                              const SphereQuadrature& q)
{
    const int n = body.dimension();
    if (!(options.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (options.attempts < 1) throw std::invalid_argument("attempts must be positive");
    const bool central = options.goal == SearchGoal::central;
    if (central) {
        double width = 0.0;
        widest_direction(body, q, &width);
        if (!(width > 1e-12))
            throw PreconditionError("central goal needs a non-trivial body (more than one point)");
    } else if (looks_symmetric(body, options.m_max, options.threshold, q)) {
        throw PreconditionError("universal goal needs a non-symmetric body: a symmetric body has vanishing odd "
                                "orders >= 3, and so does every linear image of it");
    }

    PerturbationSearchReport report;
    report.body_id = options.body_id;
    report.family = ScaleFamily::random_near_identity;
    report.m_max = options.m_max;
    report.threshold = options.threshold;
    report.epsilon = options.epsilon;
    report.central = central;

    std::mt19937_64 engine(options.seed);
    // Fixed mapping of the raw 64-bit output; std::uniform_real_distribution is implementation-defined.
    const auto uniform = [&] { return (static_cast<double>(engine() >> 11) * 0x1.0p-53) * 2.0 - 1.0; };
    const Matrix identity = Matrix::Identity(n, n);

    for (int attempt = 1; attempt <= options.attempts; ++attempt) {
        Matrix e = Matrix::Zero(n, n);
        if (attempt > 1)
            for (int c = 0; c < n; ++c)
                for (int r = 0; r < n; ++r) e(r, c) = options.epsilon * uniform();
        PerturbationSample sample{static_cast<double>(attempt), identity + e, false, {}};
        if (!(sample.matrix.determinant() > 0.0) || operator_norm(e) > options.epsilon) {
            sample.rejected = true;
            report.samples.push_back(std::move(sample));
            continue;
        }
        sample.norms = order_norms(ConvexBody::linear_image(sample.matrix, body), options.m_max, q);
        const bool passes = failure_count(sample.norms, options.threshold, central) == 0;
        report.samples.push_back(sample);
        if (passes) {
            report.winner = sample.matrix;
            report.winner_parameter = sample.parameter;
            report.certificate = certificate_from_norms(options.body_id, sample.norms, options.threshold);
            report.distance_to_identity = operator_norm(e);
            return report;
        }
    }
    record_closest_failure(report, 1.0);
    return report;
}

ConvexBody project_to_plane(const ConvexBody& body, int first_axis, int second_axis)
{
    if (body.dimension() != 3) throw std::invalid_argument("projection to a plane needs a body in R^3");
    if (first_axis == second_axis || first_axis < 0 || first_axis > 2 || second_axis < 0 || second_axis > 2)
        throw std::invalid_argument("plane must be given by two distinct axes in {0, 1, 2}");
    Matrix selection = Matrix::Zero(2, 3);
    selection(0, first_axis) = 1.0;
    selection(1, second_axis) = 1.0;
    return ConvexBody::linear_image(selection, body);
}

PerturbationSearchReport lift_from_plane(const ConvexBody& body, const SearchOptions& plane_search,
                                         const ScanOptions& scan, const SphereQuadrature& q2,
                                         const SphereQuadrature& q3)
{
    const ConvexBody shadow = project_to_plane(body, 0, 1);
    const PerturbationSearchReport planar = find_universal_image(shadow, plane_search, q2);
    if (!planar.found()) {
        PerturbationSearchReport report = planar;
        report.family = ScaleFamily::axis_scale_2;
        return report;
    }
    Matrix lift = Matrix::Identity(3, 3);
    lift.topLeftCorner(2, 2) = *planar.winner;

    ScanOptions options = scan;
    options.family = ScaleFamily::axis_scale_2;
    options.parity = Parity::all;
    options.align = false;
    PerturbationSearchReport report = scan_lambda(ConvexBody::linear_image(lift, body), options, q3);
    for (auto& s : report.samples) s.matrix = s.matrix * lift;
    if (report.winner) {
        *report.winner = *report.winner * lift;
        report.distance_to_identity = operator_norm(*report.winner - Matrix::Identity(3, 3));
    }
    return report;
}

} // namespace univex
